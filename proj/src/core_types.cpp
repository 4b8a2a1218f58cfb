#include "mka/core_types.hpp"

#include <algorithm>
#include <unordered_set>

namespace mka {

std::vector<ValidationError> validate_dataset(const std::vector<EvalItem>& items) {
    std::vector<ValidationError> errors;
    std::unordered_set<std::string> seen_ids;
    seen_ids.reserve(items.size());

    for (const auto& item : items) {
        if (!seen_ids.insert(item.id).second) {
            errors.push_back({item.id, "duplicate item id"});
        }
        if (item.choices.empty()) {
            errors.push_back({item.id, "choices must be non-empty"});
            continue;
        }
        const bool gold_found =
            std::find(item.choices.begin(), item.choices.end(), item.gold_answer) != item.choices.end();
        if (!gold_found) {
            errors.push_back({item.id, "gold_answer matches no choice verbatim"});
        }
    }
    return errors;
}

}  // namespace mka
