#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "matspace/matrix_space.hpp"

namespace matspace {

/// Syntax error in a space file; line and column are 1-based.
class ParseError : public std::invalid_argument {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what);
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// The blocks of a space file as written, before taking the span.
struct SpaceFile {
  Field field;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Matrix> blocks;
  /// One entry per out-of-range integer that was reduced.
  std::vector<std::string> warnings;
};

/// Grammar:
///
///   matspace p m n d
///   d blocks of m lines with n integers each, blocks separated by blank
///   lines; '#' starts a comment running to the end of the line.
SpaceFile parse_space_file(std::string_view text);

/// Canonical span of the blocks.
MatrixSpace parse_space(std::string_view text, std::vector<std::string>* warnings = nullptr);

/// A single bare block of m lines with n integers (comments allowed).
Matrix parse_matrix_block(std::string_view text, const Field& f, std::size_t m, std::size_t n,
                          std::vector<std::string>* warnings = nullptr);

/// Header plus the canonical basis, one block per basis element.
std::string serialize_space(const MatrixSpace& space);

/// m lines of n space-separated entries, each line ending in a newline.
std::string format_block(const Matrix& a);

}  // namespace matspace
