#pragma once

#include <string>
#include <string_view>

namespace reliefir {

// Porter stemmer, following Martin Porter's reference C implementation
// (including the "bli" and "logi" step-2 rules). Words containing anything
// other than lowercase ASCII letters are returned unchanged, as are words of
// length <= 2.
std::string porter_stem(std::string_view word);

}  // namespace reliefir
