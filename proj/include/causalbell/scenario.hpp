#pragma once

#include "causalbell/errors.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace causalbell {

namespace detail {
inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b, const char* what) {
  std::uint64_t r;
  if (__builtin_mul_overflow(a, b, &r))
    throw std::overflow_error(std::string(what) + ": product overflows 64 bits");
  return r;
}
} // namespace detail

// A measurement scenario: N parties, party i choosing among |X_i| inputs and
// producing one of |A_i| outputs. Immutable after construction.
class Scenario {
public:
  Scenario(std::vector<int> inputs, std::vector<int> outputs)
      : inputs_(std::move(inputs)), outputs_(std::move(outputs)) {
    if (inputs_.empty() || inputs_.size() != outputs_.size())
      throw std::invalid_argument("scenario: inputs/outputs must be nonempty and equal length");
    for (int x : inputs_)
      if (x < 1) throw std::invalid_argument("scenario: every party needs at least one input");
    for (int a : outputs_)
      if (a < 2) throw std::invalid_argument("scenario: every party needs at least two outputs");
    joint_inputs_ = 1;
    joint_outputs_ = 1;
    for (int x : inputs_) joint_inputs_ = detail::checked_mul(joint_inputs_, std::uint64_t(x), "scenario");
    for (int a : outputs_) joint_outputs_ = detail::checked_mul(joint_outputs_, std::uint64_t(a), "scenario");
    dimension_ = detail::checked_mul(joint_inputs_, joint_outputs_, "scenario");
  }

  static Scenario uniform(int parties, int num_inputs, int num_outputs) {
    if (parties < 1) throw std::invalid_argument("scenario: need at least one party");
    return Scenario(std::vector<int>(std::size_t(parties), num_inputs),
                    std::vector<int>(std::size_t(parties), num_outputs));
  }

  int num_parties() const { return int(inputs_.size()); }
  int num_inputs(int party) const { return inputs_.at(std::size_t(party)); }
  int num_outputs(int party) const { return outputs_.at(std::size_t(party)); }
  const std::vector<int>& inputs() const { return inputs_; }
  const std::vector<int>& outputs() const { return outputs_; }

  std::uint64_t joint_input_count() const { return joint_inputs_; }
  std::uint64_t joint_output_count() const { return joint_outputs_; }

  // Behavior-space dimension d = prod |A_i| * prod |X_i|.
  std::uint64_t dimension() const { return dimension_; }

  // Canonical flat indexing. Input tuples are x-major with x_1 slowest and
  // x_N fastest; output tuples likewise with a_N fastest. The behavior vector
  // is laid out input-context major: index = flat_input * joint_outputs + flat_output.
  std::uint64_t flat_input(std::span<const int> x) const {
    return flatten(x, inputs_, "input");
  }
  std::uint64_t flat_output(std::span<const int> a) const {
    return flatten(a, outputs_, "output");
  }
  std::uint64_t index(std::span<const int> x, std::span<const int> a) const {
    return flat_input(x) * joint_outputs_ + flat_output(a);
  }

  void unflatten_input(std::uint64_t flat, std::vector<int>& x) const {
    unflatten(flat, inputs_, x);
  }
  void unflatten_output(std::uint64_t flat, std::vector<int>& a) const {
    unflatten(flat, outputs_, a);
  }

  bool operator==(const Scenario& o) const {
    return inputs_ == o.inputs_ && outputs_ == o.outputs_;
  }
  bool operator!=(const Scenario& o) const { return !(*this == o); }

private:
  static std::uint64_t flatten(std::span<const int> t, const std::vector<int>& radix,
                               const char* what) {
    if (t.size() != radix.size())
      throw std::invalid_argument(std::string("scenario: ") + what + " tuple has wrong arity");
    std::uint64_t f = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] < 0 || t[i] >= radix[i])
        throw std::invalid_argument(std::string("scenario: ") + what + " value out of range");
      f = f * std::uint64_t(radix[i]) + std::uint64_t(t[i]);
    }
    return f;
  }

  static void unflatten(std::uint64_t flat, const std::vector<int>& radix, std::vector<int>& t) {
    t.resize(radix.size());
    for (std::size_t i = radix.size(); i-- > 0;) {
      t[i] = int(flat % std::uint64_t(radix[i]));
      flat /= std::uint64_t(radix[i]);
    }
  }

  std::vector<int> inputs_;
  std::vector<int> outputs_;
  std::uint64_t joint_inputs_ = 1;
  std::uint64_t joint_outputs_ = 1;
  std::uint64_t dimension_ = 1;
};

} // namespace causalbell
