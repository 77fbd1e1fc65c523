#pragma once

#include <string_view>

// Data files compiled into the library at configure time.
namespace sfr::embedded {

std::string_view builtin_scripts();
std::string_view validation_fixtures();
std::string_view results_matrix();
std::string_view published_family_summary();

}  // namespace sfr::embedded
