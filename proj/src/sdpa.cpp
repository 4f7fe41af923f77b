#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <tuple>

#include "jred/error.hpp"
#include "jred/io.hpp"

namespace jred {

namespace {

struct Token {
  std::string text;
  int line;
};

// Tokens of each non-comment line, with SDPA grouping punctuation removed.
std::vector<std::vector<Token>> tokenize(std::string_view text, std::string* first_comment) {
  std::vector<std::vector<Token>> lines;
  int line_no = 0;
  bool seen_comment = false;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '*' || line[first] == '"') {
      if (!seen_comment && first_comment) {
        std::string c = line.substr(first + 1);
        const size_t s = c.find_first_not_of(" \t");
        *first_comment = s == std::string::npos ? "" : c.substr(s);
      }
      seen_comment = true;
      continue;
    }
    for (char& ch : line)
      if (ch == '{' || ch == '}' || ch == '(' || ch == ')' || ch == ',' || ch == '\t') ch = ' ';
    std::vector<Token> toks;
    std::istringstream is(line);
    std::string t;
    while (is >> t) toks.push_back({t, line_no});
    if (!toks.empty()) lines.push_back(std::move(toks));
  }
  return lines;
}

double to_double(const Token& t) {
  std::string_view s = t.text;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) throw ParseError(t.line, "expected a number, got '" + t.text + "'");
  return v;
}

int to_int(const Token& t) {
  std::string_view s = t.text;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) throw ParseError(t.line, "expected an integer, got '" + t.text + "'");
  return v;
}

}  // namespace

void SdpaFile::normalize() {
  std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
    return std::tie(x.matno, x.block, x.i, x.j) < std::tie(y.matno, y.block, y.i, y.j);
  });
  std::vector<Entry> out;
  for (const auto& e : entries) {
    if (!out.empty() && out.back().matno == e.matno && out.back().block == e.block && out.back().i == e.i &&
        out.back().j == e.j)
      out.back().value += e.value;
    else
      out.push_back(e);
  }
  std::erase_if(out, [](const Entry& e) { return e.value == 0.0; });
  entries = std::move(out);
}

SdpaFile parse_sdpa(std::string_view text) {
  SdpaFile f;
  auto lines = tokenize(text, &f.name);
  size_t li = 0;
  const int last_line = static_cast<int>(std::count(text.begin(), text.end(), '\n')) + 1;
  auto need_line = [&](const char* what) -> const std::vector<Token>& {
    if (li >= lines.size()) throw ParseError(last_line, std::string("unexpected end of file, expected ") + what);
    return lines[li++];
  };
  // Reads n values starting at a new line; the rest of the last line is ignored.
  auto read_values = [&](int n, const char* what) {
    std::vector<Token> out;
    while (static_cast<int>(out.size()) < n) {
      const auto& l = need_line(what);
      for (const auto& t : l) {
        if (static_cast<int>(out.size()) == n) break;
        out.push_back(t);
      }
    }
    return out;
  };

  const Token mt = need_line("the number of constraints")[0];
  f.m = to_int(mt);
  if (f.m < 0) throw ParseError(mt.line, "negative number of constraints");
  const Token nt = need_line("the number of blocks")[0];
  const int nblocks = to_int(nt);
  if (nblocks < 1) throw ParseError(nt.line, "number of blocks must be positive");
  for (const auto& t : read_values(nblocks, "block sizes")) {
    const int s = to_int(t);
    if (s == 0) throw ParseError(t.line, "block size must be nonzero");
    f.block_sizes.push_back(s);
  }
  for (const auto& t : read_values(f.m, "the right-hand side")) f.b.push_back(to_double(t));

  for (; li < lines.size(); ++li) {
    const auto& l = lines[li];
    const int ln = l[0].line;
    if (l.size() != 5) throw ParseError(ln, "expected 5 fields in an entry line, got " + std::to_string(l.size()));
    SdpaFile::Entry e{to_int(l[0]), to_int(l[1]), to_int(l[2]), to_int(l[3]), to_double(l[4])};
    if (e.matno < 0 || e.matno > f.m) throw ParseError(ln, "matrix number out of range");
    if (e.block < 1 || e.block > nblocks) throw ParseError(ln, "block number out of range");
    if (e.i > e.j) std::swap(e.i, e.j);
    const int size = f.block_sizes[e.block - 1];
    const int order = std::abs(size);
    if (e.i < 1 || e.j > order) throw ParseError(ln, "entry index out of range");
    if (size < 0 && e.i != e.j) throw ParseError(ln, "off-diagonal entry in a diagonal block");
    f.entries.push_back(e);
  }
  f.normalize();
  return f;
}

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

std::string write_sdpa(const SdpaFile& file) {
  SdpaFile f = file;
  f.normalize();
  std::string out;
  if (!f.name.empty()) out += "* " + f.name + "\n";
  out += std::to_string(f.m) + "\n";
  out += std::to_string(f.block_sizes.size()) + "\n";
  for (size_t k = 0; k < f.block_sizes.size(); ++k) out += (k ? " " : "") + std::to_string(f.block_sizes[k]);
  out += "\n";
  for (size_t i = 0; i < f.b.size(); ++i) out += (i ? " " : "") + format_double(f.b[i]);
  out += "\n";
  for (const auto& e : f.entries)
    out += std::to_string(e.matno) + " " + std::to_string(e.block) + " " + std::to_string(e.i) + " " +
           std::to_string(e.j) + " " + format_double(e.value) + "\n";
  return out;
}

ConicProgram sdpa_to_program(const SdpaFile& f) {
  // First internal block of each file block.
  std::vector<int> orders, first;
  for (int s : f.block_sizes) {
    first.push_back(static_cast<int>(orders.size()));
    if (s > 0)
      orders.push_back(s);
    else
      orders.insert(orders.end(), static_cast<size_t>(-s), 1);
  }
  ConicProgram p;
  p.name = f.name;
  p.structure = BlockStructure(orders);
  p.a.resize(static_cast<size_t>(f.m));
  p.b = f.b;
  for (const auto& e : f.entries) {
    const bool lp = f.block_sizes[e.block - 1] < 0;
    const int k = lp ? first[e.block - 1] + e.i - 1 : first[e.block - 1];
    const int i = lp ? 0 : e.i - 1;
    const int j = lp ? 0 : e.j - 1;
    if (e.matno == 0)
      p.c.add(k, i, j, -e.value);
    else
      p.a[e.matno - 1].add(k, i, j, e.value);
  }
  p.c.normalize();
  for (auto& a : p.a) a.normalize();
  return p;
}

SdpaFile program_to_sdpa(const ConicProgram& p) {
  p.validate();
  const BlockStructure& s = p.structure;
  SdpaFile f;
  f.name = p.name;
  f.m = p.num_constraints();
  f.b = p.b;
  // File block and in-block offset of each internal block.
  std::vector<int> fblock(s.num_blocks()), offset(s.num_blocks(), 0);
  for (int k = 0; k < s.num_blocks();) {
    int run = 0;
    while (k + run < s.num_blocks() && s.order(k + run) == 1) ++run;
    if (run >= 2) {
      for (int r = 0; r < run; ++r) {
        fblock[k + r] = static_cast<int>(f.block_sizes.size()) + 1;
        offset[k + r] = r;
      }
      f.block_sizes.push_back(-run);
      k += run;
    } else {
      fblock[k] = static_cast<int>(f.block_sizes.size()) + 1;
      f.block_sizes.push_back(s.order(k));
      ++k;
    }
  }
  auto emit = [&](int matno, const SparseSymMatrix& m, double sign) {
    for (const auto& e : m.entries())
      f.entries.push_back({matno, fblock[e.block], e.i + 1 + offset[e.block], e.j + 1 + offset[e.block], sign * e.value});
  };
  emit(0, p.c, -1.0);
  for (int i = 0; i < f.m; ++i) emit(i + 1, p.a[i], 1.0);
  f.normalize();
  return f;
}

ConicProgram read_program(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return sdpa_to_program(parse_sdpa(ss.str()));
}

void write_program(const std::string& path, const ConicProgram& program) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << write_sdpa(program_to_sdpa(program));
  if (!out) throw Error("write failed for " + path);
}

}  // namespace jred
