#include "mcrn/crn.hpp"

#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace mcrn {

SpeciesId Crn::add_species(std::string name) {
  if (find(name)) throw std::invalid_argument("duplicate species '" + name + "'");
  names_.push_back(std::move(name));
  for (auto& net : net_) net.push_back(0);
  return names_.size() - 1;
}

std::size_t Crn::add_reaction(Reaction r) {
  if (!(r.rate_constant > 0.0)) throw std::invalid_argument("reaction rate constant must be > 0");
  std::vector<std::int64_t> net(names_.size(), 0);
  for (const auto& t : r.reactants) {
    if (t.species >= names_.size()) throw std::invalid_argument("reactant references unknown species");
    if (t.count < 1) throw std::invalid_argument("stoichiometric multiplicity must be >= 1");
    net[t.species] -= t.count;
  }
  for (const auto& t : r.products) {
    if (t.species >= names_.size()) throw std::invalid_argument("product references unknown species");
    if (t.count < 1) throw std::invalid_argument("stoichiometric multiplicity must be >= 1");
    net[t.species] += t.count;
  }
  reactions_.push_back(std::move(r));
  net_.push_back(std::move(net));
  return reactions_.size() - 1;
}

std::optional<SpeciesId> Crn::find(const std::string& name) const {
  for (SpeciesId i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

double propensity(const Reaction& r, const CrnState& s) {
  double a = r.rate_constant;
  for (const auto& t : r.reactants) {
    const std::int64_t n = s.counts[t.species];
    if (n < t.count) return 0.0;
    for (int k = 0; k < t.count; ++k) a *= static_cast<double>(n - k);
  }
  return a;
}

std::optional<SsaEvent> next_event(const Crn& crn, const CrnState& s, Rng& rng) {
  const auto& reactions = crn.reactions();
  // Detector networks have a handful of reactions; a small stack buffer
  // covers them and larger networks fall back to the heap.
  constexpr std::size_t kInline = 64;
  double inline_buf[kInline];
  std::vector<double> heap_buf;
  double* a = inline_buf;
  if (reactions.size() > kInline) {
    heap_buf.resize(reactions.size());
    a = heap_buf.data();
  }

  double total = 0.0;
  for (std::size_t r = 0; r < reactions.size(); ++r) {
    a[r] = propensity(reactions[r], s);
    total += a[r];
  }
  if (total <= 0.0) return std::nullopt;

  const double dt = rng.exponential(total);
  double target = rng.uniform() * total;
  std::size_t chosen = reactions.size();
  for (std::size_t r = 0; r < reactions.size(); ++r) {
    if (a[r] <= 0.0) continue;
    chosen = r;
    if (target < a[r]) break;
    target -= a[r];
  }
  return SsaEvent{chosen, dt};
}

void apply_reaction(const Crn& crn, CrnState& s, std::size_t reaction) {
  const auto& net = crn.net_change(reaction);
  for (std::size_t i = 0; i < net.size(); ++i) {
    s.counts[i] += net[i];
    if (s.counts[i] < 0) throw std::logic_error("reaction drove a species count negative");
  }
}

std::optional<std::size_t> ssa_step(const Crn& crn, CrnState& s, Rng& rng) {
  auto ev = next_event(crn, s, rng);
  if (!ev) return std::nullopt;
  s.time += ev->dt;
  apply_reaction(crn, s, ev->reaction);
  return ev->reaction;
}

std::size_t simulate(const Crn& crn, CrnState& s, double t_end, Rng& rng, Trajectory* trajectory) {
  if (t_end < s.time) throw std::invalid_argument("simulate: t_end is before the current time");
  if (trajectory) trajectory->push_back({s.time, s.counts});
  std::size_t events = 0;
  while (true) {
    auto ev = next_event(crn, s, rng);
    if (!ev || s.time + ev->dt > t_end) break;
    s.time += ev->dt;
    apply_reaction(crn, s, ev->reaction);
    ++events;
    if (trajectory) trajectory->push_back({s.time, s.counts});
  }
  s.time = t_end;
  return events;
}

std::vector<std::uint8_t> sample_stationary(const Crn& crn, CrnState& s, SpeciesId indicator,
                                            double burn_in, double interval, int m, Rng& rng) {
  if (m < 1) throw std::invalid_argument("sample_stationary: m must be >= 1");
  if (!(interval > 0.0)) throw std::invalid_argument("sample_stationary: interval must be > 0");
  if (burn_in < 0.0) throw std::invalid_argument("sample_stationary: burn_in must be >= 0");
  std::vector<std::uint8_t> out(static_cast<std::size_t>(m));
  const double start = s.time + burn_in;
  simulate(crn, s, start, rng);
  for (int k = 0; k < m; ++k) {
    if (k > 0) simulate(crn, s, start + k * interval, rng);
    out[static_cast<std::size_t>(k)] = s.counts[indicator] > 0 ? 1 : 0;
  }
  return out;
}

void write_trajectory_csv(std::ostream& out, const Crn& crn, const Trajectory& trajectory) {
  out << "time";
  for (const auto& name : crn.species_names()) out << ',' << name;
  out << '\n';
  for (const auto& p : trajectory) {
    out << fmt::format("{:.17g}", p.time);
    for (auto c : p.counts) out << ',' << c;
    out << '\n';
  }
}

}  // namespace mcrn
