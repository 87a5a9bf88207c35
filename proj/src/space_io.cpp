#include "matspace/space_io.hpp"

#include <charconv>
#include <optional>

namespace matspace {

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& what)
    : std::invalid_argument("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

namespace {

constexpr std::size_t kMaxSide = 4096;

struct Token {
  std::string_view text;
  std::size_t column;
};

struct Line {
  std::size_t number;
  std::vector<Token> tokens;
  /// Nothing but whitespace, not even a comment.
  bool blank;
};

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> out;
  std::size_t number = 0, start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(start, end - start);
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    ++number;
    Line line{number, {}, true};
    std::size_t hash = raw.find('#');
    if (hash != std::string_view::npos) {
      line.blank = false;
      raw = raw.substr(0, hash);
    }
    std::size_t i = 0;
    while (i < raw.size()) {
      if (raw[i] == ' ' || raw[i] == '\t') {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < raw.size() && raw[j] != ' ' && raw[j] != '\t') ++j;
      line.tokens.push_back({raw.substr(i, j - i), i + 1});
      i = j;
    }
    if (!line.tokens.empty()) line.blank = false;
    out.push_back(std::move(line));
    if (end == text.size()) break;
    start = end + 1;
  }
  // A trailing newline does not start another line.
  if (!out.empty() && out.back().blank && !text.empty() && text.back() == '\n') out.pop_back();
  return out;
}

std::int64_t parse_int(const Line& line, const Token& t) {
  std::int64_t v = 0;
  const char* first = t.text.data();
  const char* last = first + t.text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec == std::errc::result_out_of_range) throw ParseError(line.number, t.column, "integer out of range");
  if (ec != std::errc() || ptr != last)
    throw ParseError(line.number, t.column, "expected an integer, found '" + std::string(t.text) + "'");
  return v;
}

std::size_t parse_size(const Line& line, const Token& t, const char* what, std::size_t limit) {
  std::int64_t v = parse_int(line, t);
  if (v < 0 || static_cast<std::uint64_t>(v) > limit)
    throw ParseError(line.number, t.column,
                     std::string(what) + " must be in [0, " + std::to_string(limit) + "], got " + std::to_string(v));
  return static_cast<std::size_t>(v);
}

// Reads a block of m content lines starting at lines[pos]; pos ends one past
// the last line read.
Matrix read_block(const std::vector<Line>& lines, std::size_t& pos, const Field& f, std::size_t m, std::size_t n,
                  std::vector<std::string>& warnings) {
  Matrix a(f, m, n);
  const std::uint32_t p = f.modulus();
  for (std::size_t i = 0; i < m; ++i) {
    while (pos < lines.size() && !lines[pos].blank && lines[pos].tokens.empty()) ++pos;
    if (pos >= lines.size()) {
      std::size_t at = lines.empty() ? 1 : lines.back().number;
      throw ParseError(at, 1, "unexpected end of input, expected " + std::to_string(m - i) + " more matrix line(s)");
    }
    const Line& line = lines[pos];
    if (line.blank) throw ParseError(line.number, 1, "blank line inside a matrix block");
    if (line.tokens.size() != n)
      throw ParseError(line.number, line.tokens.size() > n ? line.tokens[n].column : 1,
                       "expected " + std::to_string(n) + " entries, found " + std::to_string(line.tokens.size()));
    for (std::size_t j = 0; j < n; ++j) {
      std::int64_t v = parse_int(line, line.tokens[j]);
      Elem e = f.reduce(v);
      if (v < 0 || v >= static_cast<std::int64_t>(p))
        warnings.push_back("line " + std::to_string(line.number) + ", column " +
                           std::to_string(line.tokens[j].column) + ": entry " + std::to_string(v) + " reduced to " +
                           std::to_string(e) + " modulo " + std::to_string(p));
      a.set(i, j, e);
    }
    ++pos;
  }
  return a;
}

void expect_rest_empty(const std::vector<Line>& lines, std::size_t pos, const char* what) {
  for (; pos < lines.size(); ++pos)
    if (!lines[pos].tokens.empty())
      throw ParseError(lines[pos].number, lines[pos].tokens.front().column, what);
}

}  // namespace

SpaceFile parse_space_file(std::string_view text) {
  auto lines = split_lines(text);
  std::size_t pos = 0;
  while (pos < lines.size() && lines[pos].tokens.empty()) ++pos;
  if (pos == lines.size()) throw ParseError(lines.empty() ? 1 : lines.back().number, 1, "missing header");
  const Line& head = lines[pos];
  if (head.tokens[0].text != "matspace")
    throw ParseError(head.number, head.tokens[0].column, "header must start with 'matspace'");
  if (head.tokens.size() != 5)
    throw ParseError(head.number, head.tokens.size() > 5 ? head.tokens[5].column : 1,
                     "header must be 'matspace p m n d'");
  std::int64_t p = parse_int(head, head.tokens[1]);
  if (p < 2 || p > kMaxModulus || !is_prime(static_cast<std::uint64_t>(p)))
    throw ParseError(head.number, head.tokens[1].column, "modulus " + std::to_string(p) + " is not a supported prime");
  std::size_t m = parse_size(head, head.tokens[2], "m", kMaxSide);
  std::size_t n = parse_size(head, head.tokens[3], "n", kMaxSide);
  std::size_t d = parse_size(head, head.tokens[4], "d", kMaxSide * kMaxSide);
  ++pos;

  SpaceFile out{Field(static_cast<std::uint32_t>(p)), m, n, {}, {}};
  if (m == 0 || n == 0) {
    expect_rest_empty(lines, pos, "matrices with no entries take no lines");
    out.blocks.assign(d, Matrix(out.field, m, n));
    return out;
  }
  for (std::size_t b = 0; b < d; ++b) {
    bool separated = false;
    while (pos < lines.size() && lines[pos].tokens.empty()) {
      separated = separated || lines[pos].blank;
      ++pos;
    }
    if (b > 0 && pos < lines.size() && !separated)
      throw ParseError(lines[pos].number, 1, "expected a blank line between matrix blocks");
    out.blocks.push_back(read_block(lines, pos, out.field, m, n, out.warnings));
  }
  expect_rest_empty(lines, pos, "unexpected content after the last matrix block");
  return out;
}

MatrixSpace parse_space(std::string_view text, std::vector<std::string>* warnings) {
  SpaceFile file = parse_space_file(text);
  if (warnings) warnings->insert(warnings->end(), file.warnings.begin(), file.warnings.end());
  return MatrixSpace::make(file.field, file.rows, file.cols, file.blocks);
}

Matrix parse_matrix_block(std::string_view text, const Field& f, std::size_t m, std::size_t n,
                          std::vector<std::string>* warnings) {
  auto lines = split_lines(text);
  std::vector<std::string> local;
  std::size_t pos = 0;
  while (pos < lines.size() && lines[pos].tokens.empty()) ++pos;
  Matrix a(f, m, n);
  if (m > 0 && n > 0) a = read_block(lines, pos, f, m, n, local);
  expect_rest_empty(lines, pos, "unexpected content after the matrix block");
  if (warnings) warnings->insert(warnings->end(), local.begin(), local.end());
  return a;
}

std::string format_block(const Matrix& a) {
  std::string out;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (j) out += ' ';
      out += std::to_string(a(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string serialize_space(const MatrixSpace& space) {
  const std::size_t m = space.rows(), n = space.cols();
  std::size_t d = m * n == 0 ? 0 : space.dim();
  std::string out = "matspace " + std::to_string(space.field().modulus()) + ' ' + std::to_string(m) + ' ' +
                    std::to_string(n) + ' ' + std::to_string(d) + '\n';
  for (std::size_t t = 0; t < d; ++t) {
    if (t) out += '\n';
    out += format_block(space.basis_element(t));
  }
  return out;
}

}  // namespace matspace
