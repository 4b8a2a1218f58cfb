#pragma once

#include <filesystem>
#include <stdexcept>
#include <vector>

#include "mka/core_types.hpp"

namespace mka {

struct DatasetParseError : std::runtime_error {
    DatasetParseError(const std::string& message, int line_number)
        : std::runtime_error(message), line(line_number) {}
    int line;
};

// Line-delimited JSON, one item per line with fields `id`, `question`,
// `choices` (array), `answer`, `lang`. UTF-8, no BOM. Blank lines are skipped.
std::vector<EvalItem> load_dataset_jsonl(const std::filesystem::path& path);

}  // namespace mka
