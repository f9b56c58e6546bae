#pragma once

#include <string>
#include <string_view>

namespace nlbash {

// Porter2 stemmer, following the current Snowball English rules. Expects a lowercase ASCII word; other
// input is returned unchanged.
std::string porter2_stem(std::string_view word);

}  // namespace nlbash
