#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mcrn/rng.hpp"

namespace mcrn {

using SpeciesId = std::size_t;

/// Species with its stoichiometric multiplicity on one side of a reaction.
struct Term {
  SpeciesId species;
  int count = 1;
};

struct Reaction {
  std::vector<Term> reactants;
  std::vector<Term> products;
  double rate_constant = 0.0;
  std::string label;
};

/// Mass-action network. Immutable once built, so it can be shared between
/// concurrent simulations.
class Crn {
 public:
  SpeciesId add_species(std::string name);

  /// Throws std::invalid_argument for unknown species, non-positive
  /// multiplicities or a rate constant that is not > 0.
  std::size_t add_reaction(Reaction r);

  std::size_t n_species() const { return names_.size(); }
  std::size_t n_reactions() const { return reactions_.size(); }
  const std::vector<std::string>& species_names() const { return names_; }
  const std::vector<Reaction>& reactions() const { return reactions_; }
  const Reaction& reaction(std::size_t r) const { return reactions_[r]; }

  std::optional<SpeciesId> find(const std::string& name) const;

  /// Net count change of every species when reaction r fires.
  const std::vector<std::int64_t>& net_change(std::size_t r) const { return net_[r]; }

 private:
  std::vector<std::string> names_;
  std::vector<Reaction> reactions_;
  std::vector<std::vector<std::int64_t>> net_;
};

struct CrnState {
  std::vector<std::int64_t> counts;
  double time = 0.0;
};

/// k_r times the falling factorial of each reactant count by its multiplicity.
double propensity(const Reaction& r, const CrnState& s);

struct SsaEvent {
  std::size_t reaction;
  double dt;
};

/// Draws the next event without applying it; nullopt when the network is
/// quiescent (total propensity zero).
std::optional<SsaEvent> next_event(const Crn& crn, const CrnState& s, Rng& rng);

void apply_reaction(const Crn& crn, CrnState& s, std::size_t reaction);

/// One direct-method step. Returns the fired reaction, or nullopt (state
/// unchanged) if the network is quiescent.
std::optional<std::size_t> ssa_step(const Crn& crn, CrnState& s, Rng& rng);

struct TrajectoryPoint {
  double time;
  std::vector<std::int64_t> counts;
};
using Trajectory = std::vector<TrajectoryPoint>;

/// Advances `s` to t_end. The pending event is discarded at the horizon, which
/// is exact because waiting times are memoryless. Returns the number of events.
/// When `trajectory` is given, the initial state and every event are appended.
std::size_t simulate(const Crn& crn, CrnState& s, double t_end, Rng& rng,
                     Trajectory* trajectory = nullptr);

/// Simulates burn_in, then records presence (count > 0) of `indicator` at m
/// instants spaced by `interval`.
std::vector<std::uint8_t> sample_stationary(const Crn& crn, CrnState& s, SpeciesId indicator,
                                            double burn_in, double interval, int m, Rng& rng);

/// CSV with header "time,<species...>" and one row per trajectory point.
void write_trajectory_csv(std::ostream& out, const Crn& crn, const Trajectory& trajectory);

}  // namespace mcrn
