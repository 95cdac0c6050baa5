#ifndef PMLE_RULES_HPP
#define PMLE_RULES_HPP

#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "pmle/config.hpp"

namespace pmle {

/// Everything a particle reads about its surroundings, arranged by its own
/// local ports. For each pair of consecutive occupied ports (i, i+1) it also
/// holds the two registers entries of the edge between those neighbours.
struct Neighbourhood {
  std::array<bool, kDegree> occupied{};
  std::array<LinkState, kDegree> toward_me{};  // neighbour at port i, its link toward us
  std::array<LinkState, kDegree> fwd{};        // neighbour at port i, its link toward neighbour at i+1
  std::array<LinkState, kDegree> back{};       // neighbour at port i+1, its link toward neighbour at i
};

/// Gathers a Neighbourhood using the simulator's global frame.
inline Neighbourhood omniscient_neighbourhood(const Configuration& c, int p) {
  Neighbourhood nb{};
  const Support& s = c.support();
  std::array<int, kDegree> who{};
  std::array<Dir, kDegree> dir{};
  for (int port = 0; port < kDegree; ++port) {
    dir[port] = c.portmap(p).port_to_dir(port);
    who[port] = s.neighbor_index(p, dir[port]);
    nb.occupied[port] = who[port] != Support::kEmpty;
    nb.toward_me[port] = nb.occupied[port] ? c.link_toward_dir(who[port], opposite(dir[port])) : LinkState::In;
  }
  for (int port = 0; port < kDegree; ++port) {
    const int nxt = mod6(port + 1);
    if (!nb.occupied[port] || !nb.occupied[nxt]) continue;
    const Dir qr = direction_between(s.cell(who[port]), s.cell(who[nxt]));
    nb.fwd[port] = c.link_toward_dir(who[port], qr);
    nb.back[port] = c.link_toward_dir(who[nxt], opposite(qr));
  }
  return nb;
}

namespace rule {

inline unsigned out_mask(const Registers& own, const Neighbourhood& nb) {
  unsigned m = 0;
  for (int port = 0; port < kDegree; ++port)
    if (nb.occupied[port] && own[port] == LinkState::Out) m |= 1u << port;
  return m;
}

/// Every edge toward a particle is directed and both sides agree.
inline bool r1(const Registers& own, const Neighbourhood& nb) {
  for (int port = 0; port < kDegree; ++port)
    if (nb.occupied[port] && (own[port] == LinkState::Out) == (nb.toward_me[port] == LinkState::Out)) return false;
  return true;
}

/// At most three outgoing edges; empty ports count as incoming.
inline bool r2(const Registers& own, const Neighbourhood& nb) {
  int n = 0;
  for (unsigned m = out_mask(own, nb); m; m &= m - 1) ++n;
  return n <= 3;
}

/// Outgoing ports form one cyclic arc (or none).
inline bool r3_mask(unsigned mask) {
  if (mask == 0 || mask == 0x3f) return true;
  int starts = 0;
  for (int port = 0; port < kDegree; ++port) {
    const bool here = mask & (1u << port);
    const bool prev = mask & (1u << mod6(port - 1));
    starts += here && !prev;
  }
  return starts == 1;
}

inline bool r3(const Registers& own, const Neighbourhood& nb) { return r3_mask(out_mask(own, nb)); }

/// No triangle through this particle is a directed 3-cycle. Undirected and
/// conflicting edges never close a cycle.
inline bool r4(const Registers& own, const Neighbourhood& nb) {
  for (int i = 0; i < kDegree; ++i) {
    const int j = mod6(i + 1);
    if (!nb.occupied[i] || !nb.occupied[j]) continue;
    const EdgeOrientation pq = orientation_of(own[i], nb.toward_me[i]);
    const EdgeOrientation qr = orientation_of(nb.fwd[i], nb.back[i]);
    const EdgeOrientation rp = orientation_of(nb.toward_me[j], own[j]);
    const auto a = EdgeOrientation::AtoB;
    const auto b = EdgeOrientation::BtoA;
    if ((pq == a && qr == a && rp == a) || (pq == b && qr == b && rp == b)) return false;
  }
  return true;
}

inline bool r234(const Registers& own, const Neighbourhood& nb) { return r2(own, nb) && r3(own, nb) && r4(own, nb); }

}  // namespace rule

inline bool check_r1(const Configuration& c, int p) { return rule::r1(c.registers(p), omniscient_neighbourhood(c, p)); }
inline bool check_r2(const Configuration& c, int p) { return rule::r2(c.registers(p), omniscient_neighbourhood(c, p)); }
inline bool check_r3(const Configuration& c, int p) { return rule::r3(c.registers(p), omniscient_neighbourhood(c, p)); }
inline bool check_r4(const Configuration& c, int p) { return rule::r4(c.registers(p), omniscient_neighbourhood(c, p)); }

inline bool check_r1(const Configuration& c, const Cell& p) { return check_r1(c, c.support().require_index(p)); }
inline bool check_r2(const Configuration& c, const Cell& p) { return check_r2(c, c.support().require_index(p)); }
inline bool check_r3(const Configuration& c, const Cell& p) { return check_r3(c, c.support().require_index(p)); }
inline bool check_r4(const Configuration& c, const Cell& p) { return check_r4(c, c.support().require_index(p)); }

/// R2, R3 or R4 fails at p.
inline bool violates_r234(const Configuration& c, int p) {
  return !rule::r234(c.registers(p), omniscient_neighbourhood(c, p));
}

/// Particles without an outgoing edge toward another particle.
inline std::vector<Cell> sinks(const Configuration& c) {
  std::vector<Cell> out;
  for (int i = 0; i < static_cast<int>(c.size()); ++i)
    if (outgoing_mask(c, i) == 0) out.push_back(c.support().cell(i));
  return out;
}

struct ParticleRules {
  Cell cell;
  bool r1 = false, r2 = false, r3 = false, r4 = false;
  bool ok() const { return r1 && r2 && r3 && r4; }
};

struct RuleReport {
  std::vector<ParticleRules> particles;
  std::vector<Cell> sinks;
  std::vector<Cell> violating;
  bool valid = false;
};

inline RuleReport rule_report(const Configuration& c) {
  RuleReport rep;
  for (int i = 0; i < static_cast<int>(c.size()); ++i) {
    const Neighbourhood nb = omniscient_neighbourhood(c, i);
    const Registers& own = c.registers(i);
    ParticleRules pr{c.support().cell(i), rule::r1(own, nb), rule::r2(own, nb), rule::r3(own, nb), rule::r4(own, nb)};
    if (!pr.ok()) rep.violating.push_back(pr.cell);
    rep.particles.push_back(pr);
  }
  rep.sinks = sinks(c);
  rep.valid = rep.violating.empty();
  return rep;
}

inline bool is_valid(const Configuration& c) {
  for (int i = 0; i < static_cast<int>(c.size()); ++i) {
    const Neighbourhood nb = omniscient_neighbourhood(c, i);
    const Registers& own = c.registers(i);
    if (!rule::r1(own, nb) || !rule::r234(own, nb)) return false;
  }
  return true;
}

inline std::vector<Cell> violating_particles(const Configuration& c) { return rule_report(c).violating; }

/// Number of particles at which R2, R3 or R4 fails.
inline int r234_violation_count(const Configuration& c) {
  int n = 0;
  for (int i = 0; i < static_cast<int>(c.size()); ++i) n += violates_r234(c, i);
  return n;
}

/// Human-readable summary; with per_particle, one line per particle.
inline std::string format_report(const RuleReport& rep, bool per_particle) {
  std::ostringstream os;
  os << (rep.valid ? "valid" : "invalid") << " particles=" << rep.particles.size()
     << " violating=" << rep.violating.size() << " sinks=" << rep.sinks.size() << '\n';
  for (const ParticleRules& pr : rep.particles) {
    if (!per_particle && pr.ok()) continue;
    os << pr.cell.q << ' ' << pr.cell.r << " r1=" << pr.r1 << " r2=" << pr.r2 << " r3=" << pr.r3
       << " r4=" << pr.r4 << '\n';
  }
  return os.str();
}

}  // namespace pmle

#endif  // PMLE_RULES_HPP
