#ifndef PMLE_ALGORITHM_HPP
#define PMLE_ALGORITHM_HPP

#include <utility>
#include <vector>

#include "pmle/config.hpp"
#include "pmle/rules.hpp"
#include "pmle/views.hpp"

namespace pmle {

/// How an activated particle evaluates R4: through the global frame, or
/// from view_3 and neighbours' registers as a real particle would.
enum class R4Route { Omniscient, Local };

struct ActivationEffect {
  bool changed = false;
  bool line1_fired = false;
  bool line2_fired = false;
  int conflicts_resolved = 0;

  friend bool operator==(const ActivationEffect&, const ActivationEffect&) = default;
};

struct ActivationResult {
  Registers next{};
  ActivationEffect effect{};
};

/// The register p writes when activated in c. Reads only p's register, its
/// neighbourhood occupancy, and its neighbours' registers.
///
///   0. each out/out edge: p's side becomes In
///   1. if R1 fails: every undirected edge becomes outgoing
///   2. if R2, R3 or R4 then fails: every outgoing edge becomes undirected
inline ActivationResult compute_activation(const Configuration& c, int p, R4Route route = R4Route::Omniscient) {
  const Neighbourhood nb = route == R4Route::Local ? local_neighbourhood(c, p) : omniscient_neighbourhood(c, p);
  ActivationResult res;
  Registers own = c.registers(p);
  for (int port = 0; port < kDegree; ++port) {
    if (nb.occupied[port] && own[port] == LinkState::Out && nb.toward_me[port] == LinkState::Out) {
      own[port] = LinkState::In;
      ++res.effect.conflicts_resolved;
    }
  }
  if (!rule::r1(own, nb)) {
    res.effect.line1_fired = true;
    for (int port = 0; port < kDegree; ++port)
      if (nb.occupied[port] && own[port] == LinkState::In && nb.toward_me[port] == LinkState::In)
        own[port] = LinkState::Out;
  }
  if (!rule::r234(own, nb)) {
    res.effect.line2_fired = true;
    for (int port = 0; port < kDegree; ++port)
      if (nb.occupied[port]) own[port] = LinkState::In;
  }
  res.effect.changed = own != c.registers(p);
  res.next = own;
  return res;
}

/// Applies the activation of p to c in place.
inline ActivationEffect activate(Configuration& c, int p, R4Route route = R4Route::Omniscient) {
  const ActivationResult res = compute_activation(c, p, route);
  if (res.effect.changed) c.set_registers(p, res.next);
  return res.effect;
}

inline std::pair<Configuration, ActivationEffect> activation_step(const Configuration& c, int p,
                                                                  R4Route route = R4Route::Omniscient) {
  Configuration next = c;
  const ActivationEffect e = activate(next, p, route);
  return {std::move(next), e};
}

inline std::pair<Configuration, ActivationEffect> activation_step(const Configuration& c, const Cell& p,
                                                                  R4Route route = R4Route::Omniscient) {
  return activation_step(c, c.support().require_index(p), route);
}

/// p's out/out edges become directed toward p; nothing else changes.
inline Configuration resolve_conflicts(const Configuration& c, int p) {
  Configuration next = c;
  const Neighbourhood nb = omniscient_neighbourhood(c, p);
  for (int port = 0; port < kDegree; ++port)
    if (nb.occupied[port] && c.link(p, port) == LinkState::Out && nb.toward_me[port] == LinkState::Out)
      next.set_link(p, port, LinkState::In);
  return next;
}

inline bool is_activable(const Configuration& c, int p, R4Route route = R4Route::Omniscient) {
  return compute_activation(c, p, route).effect.changed;
}

inline bool is_activable(const Configuration& c, const Cell& p, R4Route route = R4Route::Omniscient) {
  return is_activable(c, c.support().require_index(p), route);
}

/// Activates every particle of `set` against the same pre-state and writes
/// all new registers at once.
inline std::vector<ActivationEffect> activate_concurrently(Configuration& c, const std::vector<int>& set,
                                                           R4Route route = R4Route::Omniscient) {
  std::vector<ActivationResult> results;
  results.reserve(set.size());
  for (int p : set) results.push_back(compute_activation(c, p, route));
  std::vector<ActivationEffect> effects;
  for (std::size_t k = 0; k < set.size(); ++k) {
    if (results[k].effect.changed) c.set_registers(set[k], results[k].next);
    effects.push_back(results[k].effect);
  }
  return effects;
}

}  // namespace pmle

#endif  // PMLE_ALGORITHM_HPP
