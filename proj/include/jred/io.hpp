#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "jred/program.hpp"

namespace jred {

// SDPA sparse file. Negative block sizes are diagonal (LP) blocks. Entries use
// 1-based block and row indices with i <= j; matno 0 is the constant matrix.
struct SdpaFile {
  struct Entry {
    int matno;
    int block;
    int i;
    int j;
    double value;
  };

  std::string name;  // first comment line, without the marker
  int m = 0;
  std::vector<int> block_sizes;
  std::vector<double> b;
  std::vector<Entry> entries;

  // Sorts entries by (matno, block, i, j), sums duplicates and drops zeros.
  void normalize();
};

// Throws ParseError carrying the 1-based line number of the offending token.
// Entries with i > j are swapped.
SdpaFile parse_sdpa(std::string_view text);
std::string write_sdpa(const SdpaFile& file);

// SDPA solves max <F0, Y> s.t. <Fi, Y> = ci, so A_i = F_i, b = c and C = -F0.
// Each LP block of size n becomes n order-1 blocks.
ConicProgram sdpa_to_program(const SdpaFile& file);
// Runs of two or more order-1 blocks are written as one LP block.
SdpaFile program_to_sdpa(const ConicProgram& program);

ConicProgram read_program(const std::string& path);
void write_program(const std::string& path, const ConicProgram& program);

// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

}  // namespace jred
