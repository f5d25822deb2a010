#pragma once

#include <vector>

#include "neusurf/autodiff/tape.hpp"
#include "neusurf/core/types.hpp"

namespace neusurf {

// Sinusoidal positional encoding.
//
// For input dimension d and L frequency octaves, the output stacks
//   [ x,  sin(2^0 pi x), cos(2^0 pi x), ..., sin(2^(L-1) pi x), cos(2^(L-1) pi x) ]
// row-blocks of size d each, so the output has d * (1 + 2L) rows.  The raw
// input is always passed through (identity rows first).
struct EncodingConfig {
  int input_dim = 3;
  int levels = 6;

  int output_dim() const { return input_dim * (1 + 2 * levels); }
  Real omega(int level) const {
    return std::ldexp(3.141592653589793238462643383279502884, level);  // 2^k pi
  }
};

// Graph version.  Keeps handles to the per-level sin/cos nodes so that
// downstream code (the analytic input-gradient chain) can reuse them instead
// of recomputing the trig terms.
struct EncodingTrace {
  Tape::VarId encoded = -1;
  // Indexed [level * d + axis]; each node is a 1 x batch row.
  std::vector<Tape::VarId> sin_rows;
  std::vector<Tape::VarId> cos_rows;
  // Raw input rows, 1 x batch each, for the identity block.
  std::vector<Tape::VarId> input_rows;
};

EncodingTrace encode_graph(Tape& tape, Tape::VarId x, const EncodingConfig& cfg);

// Tape-free version, identical layout.
Mat encode_plain(const Mat& x, const EncodingConfig& cfg);

}  // namespace neusurf
