#pragma once

#include <string>
#include <string_view>

namespace ctrltab::eval {

/// Porter (1980) suffix-stripping stemmer for lowercase ASCII words. Words
/// of two letters or fewer, and words with non-letters, come back unchanged.
std::string porter_stem(std::string_view word);

} // namespace ctrltab::eval
