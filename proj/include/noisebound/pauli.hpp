#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "noisebound/errors.hpp"
#include "noisebound/linalg.hpp"

namespace noisebound {

// Basis convention: computational basis index bit q is qubit q (qubit 0 is
// the least significant bit).

inline bool is_pauli_string(std::string_view s) {
  for (char c : s)
    if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') return false;
  return true;
}

namespace detail {

struct PauliAction {
  std::uint64_t flip_mask = 0;          // X and Y flip their qubit's bit
  std::vector<int> z_like;              // qubits with Z or Y sign structure
  std::vector<int> y_qubits;            // qubits contributing the i / -i factor
};

inline PauliAction pauli_action(int n_qubits, std::span<const int> qubits,
                                std::string_view paulis) {
  if (qubits.size() != paulis.size())
    throw input_error("pauli: qubit list and string lengths differ");
  if (!is_pauli_string(paulis))
    throw input_error("pauli: string must be over {I, X, Y, Z}");
  PauliAction act;
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    const int q = qubits[i];
    if (q < 0 || q >= n_qubits)
      throw input_error("pauli: qubit index out of range");
    switch (paulis[i]) {
      case 'I': break;
      case 'X': act.flip_mask |= std::uint64_t{1} << q; break;
      case 'Y':
        act.flip_mask |= std::uint64_t{1} << q;
        act.z_like.push_back(q);
        act.y_qubits.push_back(q);
        break;
      case 'Z': act.z_like.push_back(q); break;
    }
  }
  return act;
}

// Amplitude of P|j>: product of the per-qubit column factors
//   X: 1;  Z: (-1)^bit;  Y: i for bit 0, -i for bit 1.
inline std::complex<double> pauli_column_amp(const PauliAction& act,
                                             std::uint64_t j) {
  int minus = 0;
  for (int q : act.z_like)
    if ((j >> q) & 1) ++minus;
  std::complex<double> amp = (minus & 1) ? -1.0 : 1.0;
  const int ys = static_cast<int>(act.y_qubits.size());
  switch (ys & 3) {  // i^(#Y), with the per-bit signs already in z_like
    case 1: amp *= std::complex<double>(0.0, 1.0); break;
    case 2: amp *= -1.0; break;
    case 3: amp *= std::complex<double>(0.0, -1.0); break;
    default: break;
  }
  return amp;
}

}  // namespace detail

// H += coeff * P where P is the Pauli string placed on `qubits` of an
// n-qubit register. P has exactly one entry per column, so this walks
// columns instead of forming Kronecker products.
inline void add_pauli_term(ComplexMatrix& h, double coeff, int n_qubits,
                           std::span<const int> qubits,
                           std::string_view paulis) {
  if (n_qubits < 0 || n_qubits > 20)
    throw input_error("pauli: register size out of range");
  const std::uint64_t dim = std::uint64_t{1} << n_qubits;
  if (h.rows() != static_cast<Eigen::Index>(dim) ||
      h.cols() != static_cast<Eigen::Index>(dim))
    throw input_error("pauli: matrix dimension mismatch");
  const auto act = detail::pauli_action(n_qubits, qubits, paulis);
  for (std::uint64_t j = 0; j < dim; ++j) {
    const std::uint64_t i = j ^ act.flip_mask;
    h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +=
        coeff * detail::pauli_column_amp(act, j);
  }
}

inline ComplexMatrix pauli_string_matrix(int n_qubits,
                                         std::span<const int> qubits,
                                         std::string_view paulis) {
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  add_pauli_term(m, 1.0, n_qubits, qubits, paulis);
  return m;
}

// Embeds a small unitary acting on `qubits` into the n-qubit register.
inline ComplexMatrix embed_unitary(int n_qubits, std::span<const int> qubits,
                                   const ComplexMatrix& local) {
  const int k = static_cast<int>(qubits.size());
  if (local.rows() != (Eigen::Index{1} << k) || local.rows() != local.cols())
    throw input_error("embed_unitary: local dimension mismatch");
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    if (qubits[i] < 0 || qubits[i] >= n_qubits)
      throw input_error("embed_unitary: qubit index out of range");
    for (std::size_t j = i + 1; j < qubits.size(); ++j)
      if (qubits[i] == qubits[j])
        throw input_error("embed_unitary: repeated qubit");
  }
  const std::uint64_t dim = std::uint64_t{1} << n_qubits;
  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim),
                                          static_cast<Eigen::Index>(dim));
  for (std::uint64_t j = 0; j < dim; ++j) {
    std::uint64_t local_in = 0;
    for (int b = 0; b < k; ++b)
      local_in |= ((j >> qubits[static_cast<std::size_t>(b)]) & 1) << b;
    for (std::uint64_t local_out = 0; local_out < (std::uint64_t{1} << k);
         ++local_out) {
      const std::complex<double> amp =
          local(static_cast<Eigen::Index>(local_out),
                static_cast<Eigen::Index>(local_in));
      if (amp == std::complex<double>(0.0, 0.0)) continue;
      std::uint64_t i = j;
      for (int b = 0; b < k; ++b) {
        const std::uint64_t mask = std::uint64_t{1}
                                   << qubits[static_cast<std::size_t>(b)];
        if ((local_out >> b) & 1)
          i |= mask;
        else
          i &= ~mask;
      }
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += amp;
    }
  }
  return out;
}

// Named single- and two-qubit gates accepted in schedules.
inline ComplexMatrix standard_gate(std::string_view name) {
  using cd = std::complex<double>;
  const cd i(0.0, 1.0);
  const double s = 1.0 / std::sqrt(2.0);
  ComplexMatrix g;
  if (name == "i") {
    g = ComplexMatrix::Identity(2, 2);
  } else if (name == "x") {
    g = ComplexMatrix::Zero(2, 2);
    g(0, 1) = 1.0; g(1, 0) = 1.0;
  } else if (name == "y") {
    g = ComplexMatrix::Zero(2, 2);
    g(0, 1) = -i; g(1, 0) = i;
  } else if (name == "z") {
    g = ComplexMatrix::Identity(2, 2);
    g(1, 1) = -1.0;
  } else if (name == "h") {
    g = ComplexMatrix(2, 2);
    g << s, s, s, -s;
  } else if (name == "s") {
    g = ComplexMatrix::Identity(2, 2);
    g(1, 1) = i;
  } else if (name == "sdg") {
    g = ComplexMatrix::Identity(2, 2);
    g(1, 1) = -i;
  } else if (name == "t") {
    g = ComplexMatrix::Identity(2, 2);
    g(1, 1) = std::exp(i * (std::acos(-1.0) / 4.0));
  } else if (name == "cx") {
    // control = first listed qubit (local bit 0), target = second
    g = ComplexMatrix::Zero(4, 4);
    g(0, 0) = 1.0; g(2, 2) = 1.0; g(3, 1) = 1.0; g(1, 3) = 1.0;
  } else if (name == "cz") {
    g = ComplexMatrix::Identity(4, 4);
    g(3, 3) = -1.0;
  } else if (name == "swap") {
    g = ComplexMatrix::Zero(4, 4);
    g(0, 0) = 1.0; g(1, 2) = 1.0; g(2, 1) = 1.0; g(3, 3) = 1.0;
  } else {
    throw input_error("standard_gate: unknown gate '" + std::string(name) + "'");
  }
  return g;
}

}  // namespace noisebound
