#include "decaylab/state.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "decaylab/spectral_ops.hpp"

namespace decaylab {

namespace {
constexpr std::pair<SystemId, std::string_view> kNames[] = {
    {SystemId::micropolar, "micropolar"},
    {SystemId::navier_stokes, "navier_stokes"},
    {SystemId::magneto_micropolar, "magneto_micropolar"},
    {SystemId::tropical, "tropical"},
    {SystemId::rotating_ns, "rotating_ns"},
    {SystemId::generic_linear, "generic_linear"},
    {SystemId::generic_parabolic, "generic_parabolic"},
};
}  // namespace

std::string_view to_string(SystemId id) {
  for (const auto& [k, v] : kNames)
    if (k == id) return v;
  return "unknown";
}

SystemId system_from_string(std::string_view name) {
  for (const auto& [k, v] : kNames)
    if (v == name) return k;
  throw std::invalid_argument("unknown system '" + std::string(name) + "'");
}

std::vector<BlockSpec> block_layout(SystemId id, int parabolic_components) {
  switch (id) {
    case SystemId::micropolar:
      return {{"u", 3, true}, {"w", 3, false}};
    case SystemId::navier_stokes:
    case SystemId::rotating_ns:
      return {{"u", 3, true}};
    case SystemId::magneto_micropolar:
      return {{"u", 3, true}, {"w", 3, false}, {"b", 3, true}};
    case SystemId::tropical:
      return {{"u", 3, true}, {"v", 3, false}, {"theta", 1, false}};
    case SystemId::generic_linear:
      return {{"v", 3, false}};
    case SystemId::generic_parabolic:
      if (parabolic_components < 2 || parabolic_components > 4) {
        throw std::invalid_argument("parabolic system needs 2, 3 or 4 components");
      }
      return {{"u", parabolic_components, false}};
  }
  throw std::invalid_argument("unknown system id");
}

bool State::has(std::string_view name) const {
  return std::any_of(blocks.begin(), blocks.end(), [&](const Block& b) { return b.name == name; });
}

SpectralField& State::block(std::string_view name) {
  for (auto& b : blocks)
    if (b.name == name) return b.field;
  throw std::out_of_range("state has no block '" + std::string(name) + "'");
}

const SpectralField& State::block(std::string_view name) const {
  for (const auto& b : blocks)
    if (b.name == name) return b.field;
  throw std::out_of_range("state has no block '" + std::string(name) + "'");
}

int State::width() const {
  int w = 0;
  for (const auto& b : blocks) w += b.field.components();
  return w;
}

namespace {
void require_same_layout(const State& a, const State& b) {
  if (a.blocks.size() != b.blocks.size()) throw std::invalid_argument("state layouts differ");
  for (std::size_t i = 0; i < a.blocks.size(); ++i) {
    if (a.blocks[i].name != b.blocks[i].name) throw std::invalid_argument("state layouts differ");
  }
}
}  // namespace

State& State::operator+=(const State& other) {
  require_same_layout(*this, other);
  for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i].field += other.blocks[i].field;
  return *this;
}

State& State::operator-=(const State& other) {
  require_same_layout(*this, other);
  for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i].field -= other.blocks[i].field;
  return *this;
}

State& State::axpy(double s, const State& other) {
  require_same_layout(*this, other);
  for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i].field.axpy(s, other.blocks[i].field);
  return *this;
}

State& State::operator*=(double s) {
  for (auto& b : blocks) b.field *= s;
  return *this;
}

State make_state(SystemId id, const Lattice& lat, int parabolic_components) {
  State s;
  s.system = id;
  for (const auto& spec : block_layout(id, parabolic_components)) {
    s.blocks.push_back({spec.name, SpectralField(lat, spec.components)});
  }
  return s;
}

void check_layout(const State& s, int parabolic_components) {
  const auto layout = block_layout(s.system, parabolic_components);
  if (layout.size() != s.blocks.size()) {
    throw std::invalid_argument("wrong block set for system " + std::string(to_string(s.system)));
  }
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (layout[i].name != s.blocks[i].name ||
        layout[i].components != s.blocks[i].field.components()) {
      throw std::invalid_argument("wrong block set for system " +
                                  std::string(to_string(s.system)) + ": expected block '" +
                                  layout[i].name + "'");
    }
  }
}

double solenoidal_defect(const State& s) {
  double worst = 0.0;
  const auto layout = block_layout(s.system, s.blocks.front().field.components());
  for (std::size_t i = 0; i < layout.size() && i < s.blocks.size(); ++i) {
    if (layout[i].solenoidal) {
      worst = std::max(worst, spectral::divergence_ratio(s.blocks[i].field));
    }
  }
  return worst;
}

double state_hs_norm(const State& s, double order) {
  double acc = 0.0;
  for (const auto& b : s.blocks) {
    const double v = spectral::hs_norm(b.field, order);
    acc += v * v;
  }
  return std::sqrt(acc);
}

double state_inner(const State& a, const State& b) {
  require_same_layout(a, b);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.blocks.size(); ++i) {
    acc += spectral::inner(a.blocks[i].field, b.blocks[i].field);
  }
  return acc;
}

SpectralField stacked(const State& s) {
  SpectralField out(s.lattice(), s.width());
  int c0 = 0;
  for (const auto& b : s.blocks) {
    for (int c = 0; c < b.field.components(); ++c) {
      auto src = b.field.component(c);
      std::copy(src.begin(), src.end(), out.component(c0 + c).begin());
    }
    c0 += b.field.components();
  }
  return out;
}

}  // namespace decaylab
