#include "neusurf/autodiff/params.hpp"

#include <stdexcept>

namespace neusurf {

Param* ParamStore::add(const std::string& name, Mat init) {
  if (find(name))
    throw std::invalid_argument("ParamStore: duplicate parameter " + name);
  items_.push_back(std::make_unique<Param>(name, std::move(init)));
  return items_.back().get();
}

Param* ParamStore::find(const std::string& name) {
  for (auto& p : items_)
    if (p->name == name) return p.get();
  return nullptr;
}

void ParamStore::bind(Tape& tape) {
  for (auto& p : items_) p->var = tape.input(p->value);
}

void ParamStore::save(TensorFile& tf) const {
  for (const auto& p : items_) {
    tf.put(p->name, p->value);
    tf.put(p->name + ".adam_m", p->m);
    tf.put(p->name + ".adam_v", p->v);
  }
}

void ParamStore::load(const TensorFile& tf) {
  for (auto& p : items_) {
    const Mat& v = tf.get(p->name);
    if (v.rows() != p->value.rows() || v.cols() != p->value.cols())
      throw std::runtime_error("ParamStore: shape mismatch for " + p->name);
    p->value = v;
    p->m = tf.get(p->name + ".adam_m");
    p->v = tf.get(p->name + ".adam_v");
    if (p->m.rows() != v.rows() || p->m.cols() != v.cols() ||
        p->v.rows() != v.rows() || p->v.cols() != v.cols())
      throw std::runtime_error("ParamStore: moment shape mismatch for " + p->name);
  }
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : items_) n += static_cast<std::size_t>(p->value.size());
  return n;
}

}  // namespace neusurf
