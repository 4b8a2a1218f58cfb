#include "mka/dataset.hpp"

#include <fstream>
#include <string>

#include <json.hpp>

#include "mka/text.hpp"

namespace mka {

std::vector<EvalItem> load_dataset_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path.string());

    std::vector<EvalItem> items;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line_number == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) {
            throw DatasetParseError("dataset must be UTF-8 without BOM", 1);
        }
        if (text::trim(line).empty()) continue;
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DatasetParseError("line " + std::to_string(line_number) + ": " + e.what(), line_number);
        }
        try {
            EvalItem item;
            item.id = doc.at("id").get<std::string>();
            item.question = doc.at("question").get<std::string>();
            item.choices = doc.at("choices").get<std::vector<std::string>>();
            item.gold_answer = doc.at("answer").get<std::string>();
            item.target_language = doc.at("lang").get<std::string>();
            items.push_back(std::move(item));
        } catch (const nlohmann::json::exception& e) {
            throw DatasetParseError("line " + std::to_string(line_number) + ": " + e.what(), line_number);
        }
    }
    return items;
}

}  // namespace mka
