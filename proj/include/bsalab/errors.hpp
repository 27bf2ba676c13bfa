#pragma once

#include <stdexcept>
#include <string>

namespace bsalab {

enum class errc {
  not_hermitian,
  negative_eigenvalue,
  vanishing_norm,
  invalid_prob_vec,
  unphysical_correlation,
  not_density_matrix,
  not_bell_diagonal,
  not_in_singlet_tetra,
  degenerate_vertex,
  not_on_face,
  degenerate_pair,
  rank_not_three,
  reconstruction_mismatch,
  non_convergence,
  invalid_input,
};

// Single exception type; the code tells the CLI which exit path applies.
class error : public std::runtime_error {
 public:
  error(errc c, const std::string& msg) : std::runtime_error(msg), code_(c) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc c, const std::string& msg) { throw error(c, msg); }

}  // namespace bsalab
