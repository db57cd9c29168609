#include "artism/naming.hpp"

#include <cctype>

#include "artism/error.hpp"
#include "artism/text.hpp"

namespace artism {

namespace {

std::string hyphenated_title(const std::string& label) {
    std::vector<std::string> words;
    for (auto& w : text::split_whitespace(label)) words.push_back(text::title_case(text::to_lower(w)));
    return text::join(words, "-");
}

bool ends_with(const std::string& s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

std::string ism_name_from_units(const std::vector<std::string>& unit_labels) {
    require(unit_labels.size() >= 2, "an ism needs at least two units");
    std::vector<std::string> modifiers;
    for (std::size_t i = 0; i + 1 < unit_labels.size(); ++i) modifiers.push_back(hyphenated_title(unit_labels[i]));

    std::string head = hyphenated_title(unit_labels.back());
    require(!head.empty(), "empty head unit");
    if (!ends_with(text::to_lower(head), "ism")) {
        const char last = static_cast<char>(std::tolower(static_cast<unsigned char>(head.back())));
        if (last == 'a' || last == 'e' || last == 'i' || last == 'o' || last == 'u') head.pop_back();
        head += "ism";
    }
    return text::join(modifiers, "-") + " " + head;
}

}  // namespace artism
