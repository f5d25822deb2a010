#pragma once

#include <memory>
#include <string>
#include <vector>

#include "neusurf/autodiff/tape.hpp"
#include "neusurf/core/tensor_file.hpp"
#include "neusurf/core/types.hpp"

namespace neusurf {

// One trainable tensor plus its optimizer state.  Parameters live outside
// any tape; each optimization step binds them as fresh input leaves.
struct Param {
  std::string name;
  Mat value;
  Mat m;  // Adam first moment
  Mat v;  // Adam second moment
  Tape::VarId var = -1;  // leaf id on the currently bound tape, -1 if unbound

  explicit Param(std::string n, Mat init)
      : name(std::move(n)),
        value(std::move(init)),
        m(Mat::Zero(value.rows(), value.cols())),
        v(Mat::Zero(value.rows(), value.cols())) {}
};

// Owns parameters; hands out stable pointers.
class ParamStore {
 public:
  Param* add(const std::string& name, Mat init);
  Param* find(const std::string& name);  // nullptr if absent
  const std::vector<std::unique_ptr<Param>>& items() const { return items_; }

  // Binds every parameter as a differentiable leaf on `tape`.
  void bind(Tape& tape);

  // Serialization: "<name>", "<name>.adam_m", "<name>.adam_v" per parameter.
  void save(TensorFile& tf) const;
  // Restores values and moments; throws if a parameter is missing or has a
  // mismatched shape.
  void load(const TensorFile& tf);

  std::size_t scalar_count() const;

 private:
  std::vector<std::unique_ptr<Param>> items_;
};

}  // namespace neusurf
