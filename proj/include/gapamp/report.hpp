#pragma once

#include "json.hpp"

#include <filesystem>

namespace gapamp {

/// Aggregates every *.csv under `dir` into one JSON document:
///   files:  per file, row count and pass/fail counts when a "pass" column exists
///   slopes: fitted log–log slopes for the known artifacts (Trotter error vs
///           steps per order, lattice gap vs M, median hitting time vs M)
///   errors: unreadable or malformed files, with the reason
/// A missing or empty directory gives an empty summary.
nlohmann::json build_report(const std::filesystem::path& dir);

}  // namespace gapamp
