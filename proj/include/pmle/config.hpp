#ifndef PMLE_CONFIG_HPP
#define PMLE_CONFIG_HPP

#include <array>
#include <cstdint>
#include <istream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pmle/lattice.hpp"
#include "pmle/support.hpp"

namespace pmle {

enum class LinkState : std::uint8_t { In = 0, Out = 1 };

/// Link register of one particle, indexed by local port.
using Registers = std::array<LinkState, kDegree>;

inline constexpr Registers kAllIn = {LinkState::In, LinkState::In, LinkState::In,
                                     LinkState::In, LinkState::In, LinkState::In};

/// Orientation of an edge a-b as read from both registers.
enum class EdgeOrientation { AtoB, BtoA, Undirected, Conflict };

constexpr EdgeOrientation orientation_of(LinkState a_side, LinkState b_side) {
  if (a_side == LinkState::Out) return b_side == LinkState::Out ? EdgeOrientation::Conflict : EdgeOrientation::AtoB;
  return b_side == LinkState::Out ? EdgeOrientation::BtoA : EdgeOrientation::Undirected;
}

constexpr EdgeOrientation mirrored(EdgeOrientation o) {
  switch (o) {
    case EdgeOrientation::AtoB: return EdgeOrientation::BtoA;
    case EdgeOrientation::BtoA: return EdgeOrientation::AtoB;
    default: return o;
  }
}

inline const char* to_string(EdgeOrientation o) {
  switch (o) {
    case EdgeOrientation::AtoB: return "a->b";
    case EdgeOrientation::BtoA: return "b->a";
    case EdgeOrientation::Undirected: return "undirected";
    case EdgeOrientation::Conflict: return "conflict";
  }
  return "?";
}

/// Full system state: support, per-particle port maps, per-particle registers.
///
/// Every port that leads to an empty cell holds In; construction and every
/// mutation enforce it. Copies share the immutable Support.
class Configuration {
 public:
  Configuration(std::shared_ptr<const Support> support, std::vector<PortMap> portmaps,
                std::vector<Registers> regs)
      : support_(std::move(support)), portmaps_(std::move(portmaps)), regs_(std::move(regs)) {
    if (!support_) throw std::invalid_argument("configuration needs a support");
    if (portmaps_.size() != support_->size() || regs_.size() != support_->size())
      throw std::invalid_argument("configuration: portmap/register count differs from support size");
    for (const PortMap& m : portmaps_)
      if (m.offset < 0 || m.offset >= kDegree || (m.chirality != 1 && m.chirality != -1))
        throw std::invalid_argument("configuration: malformed port map");
    for (int i = 0; i < static_cast<int>(size()); ++i)
      for (int port = 0; port < kDegree; ++port) check_link(i, port, regs_[static_cast<std::size_t>(i)][port]);
  }

  /// All links In, identity port maps unless given.
  static Configuration all_in(std::shared_ptr<const Support> support, std::vector<PortMap> portmaps = {}) {
    const std::size_t n = support->size();
    if (portmaps.empty()) portmaps.assign(n, kIdentityPortMap);
    return Configuration(std::move(support), std::move(portmaps), std::vector<Registers>(n, kAllIn));
  }

  static Configuration all_in(const Support& support, std::vector<PortMap> portmaps = {}) {
    return all_in(std::make_shared<const Support>(support), std::move(portmaps));
  }

  const Support& support() const noexcept { return *support_; }
  const std::shared_ptr<const Support>& support_ptr() const noexcept { return support_; }
  std::size_t size() const noexcept { return support_->size(); }

  const PortMap& portmap(int i) const { return portmaps_.at(static_cast<std::size_t>(i)); }
  const std::vector<PortMap>& portmaps() const noexcept { return portmaps_; }
  const Registers& registers(int i) const { return regs_.at(static_cast<std::size_t>(i)); }
  const std::vector<Registers>& all_registers() const noexcept { return regs_; }

  /// Particle index in local port `port` of particle i, or Support::kEmpty.
  int neighbor_at_port(int i, int port) const {
    return support_->neighbor_index(i, portmap(i).port_to_dir(port));
  }
  /// Local port of particle i leading in global direction d.
  int port_toward_dir(int i, Dir d) const { return portmap(i).dir_to_port(d); }
  /// Local port of i leading to adjacent particle j.
  int port_toward(int i, int j) const {
    const Dir d = direction_between(support_->cell(i), support_->cell(j));
    if (d < 0) throw std::invalid_argument("port_toward: particles are not adjacent");
    return port_toward_dir(i, d);
  }
  LinkState link(int i, int port) const { return registers(i)[mod6(port)]; }
  LinkState link_toward_dir(int i, Dir d) const { return link(i, port_toward_dir(i, d)); }

  void set_link(int i, int port, LinkState v) {
    port = mod6(port);
    check_link(i, port, v);
    regs_.at(static_cast<std::size_t>(i))[port] = v;
  }
  void set_registers(int i, const Registers& r) {
    for (int port = 0; port < kDegree; ++port) check_link(i, port, r[port]);
    regs_.at(static_cast<std::size_t>(i)) = r;
  }

  /// The configuration with particle i deleted: its cell becomes empty and
  /// every neighbour's link toward it becomes In. Port maps are kept.
  Configuration without(int i) const {
    std::vector<Cell> cells;
    std::vector<PortMap> pm;
    std::vector<Registers> regs;
    for (int j = 0; j < static_cast<int>(size()); ++j) {
      if (j == i) continue;
      cells.push_back(support_->cell(j));
      pm.push_back(portmap(j));
      Registers r = registers(j);
      const Dir d = direction_between(support_->cell(j), support_->cell(i));
      if (d >= 0) r[port_toward_dir(j, d)] = LinkState::In;
      regs.push_back(r);
    }
    // Cells come out sorted because the source order is sorted.
    return Configuration(std::make_shared<const Support>(std::move(cells)), std::move(pm), std::move(regs));
  }

  friend bool operator==(const Configuration& a, const Configuration& b) {
    return a.support() == b.support() && a.portmaps_ == b.portmaps_ && a.regs_ == b.regs_;
  }

 private:
  void check_link(int i, int port, LinkState v) const {
    if (v == LinkState::Out && support_->neighbor_index(i, portmap(i).port_to_dir(port)) == Support::kEmpty) {
      std::ostringstream os;
      os << "link Out toward an empty cell at particle " << support_->cell(i) << " port " << port;
      throw std::invalid_argument(os.str());
    }
  }

  std::shared_ptr<const Support> support_;
  std::vector<PortMap> portmaps_;
  std::vector<Registers> regs_;
};

/// Orientation of edge a-b; a and b must be adjacent particles.
inline EdgeOrientation orientation(const Configuration& c, int a, int b) {
  const Dir d = direction_between(c.support().cell(a), c.support().cell(b));
  if (d < 0) throw std::invalid_argument("orientation: particles are not adjacent");
  return orientation_of(c.link_toward_dir(a, d), c.link_toward_dir(b, opposite(d)));
}

inline EdgeOrientation orientation(const Configuration& c, const Cell& a, const Cell& b) {
  return orientation(c, c.support().require_index(a), c.support().require_index(b));
}

/// Bit i set when port i of particle p leads to a particle and holds Out.
inline unsigned outgoing_mask(const Configuration& c, int p) {
  unsigned mask = 0;
  const Registers& r = c.registers(p);
  for (int port = 0; port < kDegree; ++port)
    if (r[port] == LinkState::Out && c.neighbor_at_port(p, port) != Support::kEmpty) mask |= 1u << port;
  return mask;
}

inline std::vector<int> outgoing_ports(const Configuration& c, const Cell& p) {
  const unsigned mask = outgoing_mask(c, c.support().require_index(p));
  std::vector<int> ports;
  for (int port = 0; port < kDegree; ++port)
    if (mask & (1u << port)) ports.push_back(port);
  return ports;
}

// Text format:
//
//   [shape]
//   q r                      (one per cell)
//   [cells]
//   q r | offset chirality | l0 l1 l2 l3 l4 l5     with l in {I, O}
//
// Cells are written in sorted order; chirality is written as +1 or -1.

inline std::string serialize(const Configuration& c) {
  std::ostringstream os;
  os << "[shape]\n" << format_shape(c.support()) << "[cells]\n";
  for (int i = 0; i < static_cast<int>(c.size()); ++i) {
    const Cell& cell = c.support().cell(i);
    const PortMap& m = c.portmap(i);
    os << cell.q << ' ' << cell.r << " | " << m.offset << ' ' << (m.chirality > 0 ? "+1" : "-1") << " |";
    for (LinkState l : c.registers(i)) os << ' ' << (l == LinkState::Out ? 'O' : 'I');
    os << '\n';
  }
  return os.str();
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_bars(const std::string& s) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : s) {
    if (ch == '|') {
      parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(trim(cur));
  return parts;
}

}  // namespace detail

inline Configuration deserialize(std::istream& in) {
  enum class Section { None, Shape, Cells } section = Section::None;
  std::vector<Cell> shape;
  struct Row {
    Cell cell;
    PortMap pm;
    Registers regs;
    int line;
  };
  std::vector<Row> rows;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line == "[shape]") {
      section = Section::Shape;
      continue;
    }
    if (line == "[cells]") {
      section = Section::Cells;
      continue;
    }
    if (section == Section::None) throw ParseError(lineno, "expected [shape] header");
    if (section == Section::Shape) {
      std::istringstream ls(line);
      int q = 0, r = 0;
      std::string extra;
      if (!(ls >> q >> r) || (ls >> extra)) throw ParseError(lineno, "expected 'q r' in [shape]");
      shape.push_back({q, r});
      continue;
    }
    const auto parts = detail::split_bars(line);
    if (parts.size() != 3) throw ParseError(lineno, "expected 'q r | offset chirality | l0 .. l5'");
    Row row{};
    row.line = lineno;
    {
      std::istringstream ls(parts[0]);
      std::string extra;
      if (!(ls >> row.cell.q >> row.cell.r) || (ls >> extra)) throw ParseError(lineno, "bad cell coordinates");
    }
    {
      std::istringstream ls(parts[1]);
      std::string chir, extra;
      if (!(ls >> row.pm.offset >> chir) || (ls >> extra)) throw ParseError(lineno, "bad port map");
      if (row.pm.offset < 0 || row.pm.offset >= kDegree) throw ParseError(lineno, "port map offset outside 0..5");
      if (chir == "+1" || chir == "1") {
        row.pm.chirality = 1;
      } else if (chir == "-1") {
        row.pm.chirality = -1;
      } else {
        throw ParseError(lineno, "chirality must be +1 or -1");
      }
    }
    {
      std::istringstream ls(parts[2]);
      std::string tok;
      int k = 0;
      while (ls >> tok) {
        if (k >= kDegree) throw ParseError(lineno, "more than six links");
        if (tok == "I") {
          row.regs[k] = LinkState::In;
        } else if (tok == "O") {
          row.regs[k] = LinkState::Out;
        } else {
          throw ParseError(lineno, "link must be I or O, got '" + tok + "'");
        }
        ++k;
      }
      if (k != kDegree) throw ParseError(lineno, "expected six links");
    }
    rows.push_back(row);
  }
  if (shape.empty()) throw ParseError(lineno, "missing [shape] block");

  std::shared_ptr<const Support> support;
  try {
    support = std::make_shared<const Support>(shape);
  } catch (const std::invalid_argument& e) {
    throw ParseError(lineno, e.what());
  }
  if (support->size() != shape.size()) throw ParseError(lineno, "duplicate cell in [shape]");
  std::vector<PortMap> pms(support->size());
  std::vector<Registers> regs(support->size(), kAllIn);
  std::vector<char> seen(support->size(), 0);
  for (const Row& row : rows) {
    auto idx = support->index_of(row.cell);
    if (!idx) {
      std::ostringstream os;
      os << "cell " << row.cell << " is not in [shape]";
      throw ParseError(row.line, os.str());
    }
    const auto i = static_cast<std::size_t>(*idx);
    if (seen[i]) throw ParseError(row.line, "duplicate cell entry");
    seen[i] = 1;
    pms[i] = row.pm;
    regs[i] = row.regs;
    for (int port = 0; port < kDegree; ++port) {
      if (row.regs[port] == LinkState::Out &&
          support->neighbor_index(*idx, row.pm.port_to_dir(port)) == Support::kEmpty) {
        std::ostringstream os;
        os << "link Out toward an empty cell at particle " << row.cell << " port " << port;
        throw ParseError(row.line, os.str());
      }
    }
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) {
      std::ostringstream os;
      os << "missing port map and registers for cell " << support->cells()[i];
      throw ParseError(lineno, os.str());
    }
  }
  return Configuration(std::move(support), std::move(pms), std::move(regs));
}

inline Configuration deserialize(const std::string& text) {
  std::istringstream in(text);
  return deserialize(in);
}

}  // namespace pmle

#endif  // PMLE_CONFIG_HPP
