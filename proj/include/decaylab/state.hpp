#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "decaylab/spectral_field.hpp"

namespace decaylab {

enum class SystemId {
  micropolar,
  navier_stokes,
  magneto_micropolar,
  tropical,
  rotating_ns,
  generic_linear,
  generic_parabolic,
};

std::string_view to_string(SystemId id);
SystemId system_from_string(std::string_view name);

struct BlockSpec {
  std::string name;
  int components;
  bool solenoidal;
};

/// Canonical block layout of a system. `parabolic_components` only matters
/// for the generic parabolic system.
std::vector<BlockSpec> block_layout(SystemId id, int parabolic_components = 3);

struct Block {
  std::string name;
  SpectralField field;
};

/// z = (u, w[, b][, theta]...) for one system, ordered as block_layout.
struct State {
  SystemId system = SystemId::micropolar;
  double time = 0.0;
  std::vector<Block> blocks;

  [[nodiscard]] const Lattice& lattice() const { return blocks.front().field.lattice(); }
  [[nodiscard]] bool has(std::string_view name) const;
  SpectralField& block(std::string_view name);
  [[nodiscard]] const SpectralField& block(std::string_view name) const;
  /// Total number of scalar components over all blocks.
  [[nodiscard]] int width() const;

  State& operator+=(const State& other);
  State& operator-=(const State& other);
  State& axpy(double s, const State& other);
  State& operator*=(double s);
};

/// Zero state with the system's block layout.
State make_state(SystemId id, const Lattice& lat, int parabolic_components = 3);

/// Throws when the blocks do not match the system's layout.
void check_layout(const State& s, int parabolic_components = 3);

/// Max over solenoidal blocks of spectral::divergence_ratio.
double solenoidal_defect(const State& s);

// Norms over the whole state: Euclidean combination over blocks.
double state_hs_norm(const State& s, double order);
double state_inner(const State& a, const State& b);

/// All blocks stacked into one field (components concatenated), for
/// pointwise norms of the whole state.
SpectralField stacked(const State& s);

}  // namespace decaylab
