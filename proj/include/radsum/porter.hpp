#pragma once

#include <string>
#include <string_view>

namespace radsum {

/// Porter (1980) suffix stripping, steps 1a through 5b, as originally
/// published (ABLI -> ABLE in step 2, no LOGI rule, no short-word bypass).
/// Input is lowercased first. Any non-vowel byte counts as a consonant.
std::string porter_stem(std::string_view token);

}  // namespace radsum
