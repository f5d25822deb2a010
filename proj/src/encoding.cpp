#include "neusurf/autodiff/encoding.hpp"

#include <cmath>

namespace neusurf {

EncodingTrace encode_graph(Tape& tape, Tape::VarId x, const EncodingConfig& cfg) {
  const int d = cfg.input_dim;
  EncodingTrace trace;
  std::vector<Tape::VarId> parts;
  parts.reserve(static_cast<std::size_t>(1 + 2 * cfg.levels));

  for (int a = 0; a < d; ++a)
    trace.input_rows.push_back(tape.slice_rows(x, a, 1));
  parts.push_back(x);

  trace.sin_rows.resize(static_cast<std::size_t>(cfg.levels) * d, -1);
  trace.cos_rows.resize(static_cast<std::size_t>(cfg.levels) * d, -1);
  for (int k = 0; k < cfg.levels; ++k) {
    const Real w = cfg.omega(k);
    std::vector<Tape::VarId> sins, coss;
    for (int a = 0; a < d; ++a) {
      Tape::VarId arg = tape.scale(trace.input_rows[a], w);
      Tape::VarId s = tape.sin(arg);
      Tape::VarId c = tape.cos(arg);
      trace.sin_rows[static_cast<std::size_t>(k) * d + a] = s;
      trace.cos_rows[static_cast<std::size_t>(k) * d + a] = c;
      sins.push_back(s);
      coss.push_back(c);
    }
    parts.push_back(tape.concat_rows(sins));
    parts.push_back(tape.concat_rows(coss));
  }
  trace.encoded = tape.concat_rows(parts);
  return trace;
}

Mat encode_plain(const Mat& x, const EncodingConfig& cfg) {
  const int d = cfg.input_dim;
  Mat out(cfg.output_dim(), x.cols());
  out.topRows(d) = x;
  for (int k = 0; k < cfg.levels; ++k) {
    const Real w = cfg.omega(k);
    for (int a = 0; a < d; ++a) {
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const Real arg = w * x(a, j);
        out(d + 2 * k * d + a, j) = std::sin(arg);
        out(d + (2 * k + 1) * d + a, j) = std::cos(arg);
      }
    }
  }
  return out;
}

}  // namespace neusurf
