#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "bpperm/matrix.hpp"

namespace bpperm {

enum class MatrixFormat { csv, json };

// "csv" or "json"; throws ParseError otherwise.
MatrixFormat parse_matrix_format(std::string_view name);

// Picks json for a ".json" extension and csv for anything else.
MatrixFormat guess_matrix_format(const std::filesystem::path& path);

// CSV: n lines of n comma-separated non-negative decimals, no header.
// JSON: {"p": [[...], ...], "temperature": T}; temperature is optional.
// Temperature defaults to 1. Errors: ParseError for unreadable input or bad
// tokens, ShapeError for a non-square grid, DomainError for negative entries.
WeightMatrix parse_matrix(std::string_view text, MatrixFormat format);
WeightMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format);

std::string to_csv(const SquareMatrix& m);

}  // namespace bpperm
