#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <memory>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "sharp/error.hpp"
#include "sharp/linalg.hpp"

namespace sharp {

enum class SystemKind {
  quantum,    // one sector
  classical,  // singleton sectors, labels compose by product
  coherent,   // singleton sectors, labels compose by the offset rule
  mirror,     // arbitrary sectors, labels compose by the offset rule
  composite,
};

constexpr std::string_view to_string(SystemKind k) noexcept {
  switch (k) {
    case SystemKind::quantum: return "quantum";
    case SystemKind::classical: return "classical";
    case SystemKind::coherent: return "coherent";
    case SystemKind::mirror: return "mirror";
    case SystemKind::composite: return "composite";
  }
  return "unknown";
}

constexpr std::string_view to_string(Field f) noexcept {
  return f == Field::real ? "real" : "complex";
}

/// A physical system: an ordered partition of the canonical basis of an
/// n-dimensional real or complex space into sectors. States of the system are
/// block-diagonal with respect to the partition. Composites remember their two
/// factors; basis index (i, j) of A (x) B is i * dim(B) + j.
///
/// Values are immutable after construction and cheap to copy (factors are
/// shared).
class SystemDescriptor {
 public:
  using Sector = std::vector<std::size_t>;

  struct Location {
    std::size_t sector;
    std::size_t offset;  // position inside the sector's sorted index list
  };

  static SystemDescriptor quantum(std::size_t d, Field field = Field::complex) {
    require_positive(d);
    Sector all(d);
    std::iota(all.begin(), all.end(), std::size_t{0});
    return SystemDescriptor(SystemKind::quantum, field, {std::move(all)}, nullptr);
  }

  static SystemDescriptor classical(std::size_t d, Field field = Field::complex) {
    require_positive(d);
    return SystemDescriptor(SystemKind::classical, field, singletons(d), nullptr);
  }

  static SystemDescriptor coherent(std::size_t d, Field field = Field::complex) {
    require_positive(d);
    return SystemDescriptor(SystemKind::coherent, field, singletons(d), nullptr);
  }

  /// Coherent-labelled system with prescribed sector dimensions laid out as
  /// consecutive index ranges. Used as the purifying partner of general
  /// sector-structured systems.
  static SystemDescriptor mirror(const std::vector<std::size_t>& sector_dims,
                                 Field field = Field::complex) {
    if (sector_dims.empty()) throw Error(Errc::invalid_dimension, "mirror system needs a sector");
    std::vector<Sector> sectors;
    std::size_t next = 0;
    for (std::size_t n : sector_dims) {
      require_positive(n);
      Sector s(n);
      std::iota(s.begin(), s.end(), next);
      next += n;
      sectors.push_back(std::move(s));
    }
    return SystemDescriptor(SystemKind::mirror, field, std::move(sectors), nullptr);
  }

  /// Rebuilds a non-composite descriptor from an explicit partition; the
  /// kind-specific shape invariants are enforced.
  static SystemDescriptor from_sectors(SystemKind kind, Field field, std::vector<Sector> sectors) {
    if (kind == SystemKind::composite)
      throw Error(Errc::not_a_composite, "composites are rebuilt from their factors");
    return SystemDescriptor(kind, field, std::move(sectors), nullptr);
  }

  friend SystemDescriptor compose(const SystemDescriptor& a, const SystemDescriptor& b);

  [[nodiscard]] SystemKind kind() const noexcept { return kind_; }
  [[nodiscard]] Field field() const noexcept { return field_; }
  [[nodiscard]] std::size_t dim() const noexcept { return locations_.size(); }
  /// Number of perfectly distinguishable pure states; equals dim().
  [[nodiscard]] std::size_t gpt_dim() const noexcept { return dim(); }
  [[nodiscard]] const std::vector<Sector>& sectors() const noexcept { return sectors_; }
  [[nodiscard]] std::size_t sector_count() const noexcept { return sectors_.size(); }
  [[nodiscard]] std::size_t sector_dim(std::size_t s) const { return sectors_.at(s).size(); }
  [[nodiscard]] Location locate(std::size_t index) const { return locations_.at(index); }
  [[nodiscard]] bool is_composite() const noexcept { return factors_ != nullptr; }
  [[nodiscard]] bool is_trivial() const noexcept { return dim() == 1; }

  /// Whether sector labels combine through the offset rule when composed.
  [[nodiscard]] bool coherent_labels() const noexcept {
    return kind_ == SystemKind::coherent || kind_ == SystemKind::mirror;
  }

  [[nodiscard]] const SystemDescriptor& factor(std::size_t k) const {
    if (!factors_) throw Error(Errc::not_a_composite, "system " + label() + " has no factors");
    return (*factors_).at(k);
  }

  /// Splits a composite basis index into the factor indices (i, j).
  [[nodiscard]] std::pair<std::size_t, std::size_t> split(std::size_t index) const {
    const std::size_t nb = factor(1).dim();
    return {index / nb, index % nb};
  }

  [[nodiscard]] std::string label() const {
    switch (kind_) {
      case SystemKind::quantum:
        return std::string(field_ == Field::real ? "real:" : "quantum:") + std::to_string(dim());
      case SystemKind::classical: return "classical:" + std::to_string(dim());
      case SystemKind::coherent: return "coherent:" + std::to_string(dim());
      case SystemKind::mirror: {
        std::string out = "mirror:";
        for (std::size_t s = 0; s < sectors_.size(); ++s) {
          if (s) out += ',';
          out += std::to_string(sectors_[s].size());
        }
        return out;
      }
      case SystemKind::composite: {
        auto wrap = [](const SystemDescriptor& f) {
          return f.is_composite() ? "(" + f.label() + ")" : f.label();
        };
        return wrap(factor(0)) + "*" + wrap(factor(1));
      }
    }
    return "?";
  }

  friend bool operator==(const SystemDescriptor& x, const SystemDescriptor& y) {
    if (x.kind_ != y.kind_ || x.field_ != y.field_ || x.sectors_ != y.sectors_) return false;
    if (x.is_composite() != y.is_composite()) return false;
    if (!x.is_composite()) return true;
    return x.factor(0) == y.factor(0) && x.factor(1) == y.factor(1);
  }

 private:
  using Factors = std::array<SystemDescriptor, 2>;

  SystemDescriptor(SystemKind kind, Field field, std::vector<Sector> sectors,
                   std::shared_ptr<const Factors> factors)
      : kind_(kind), field_(field), sectors_(std::move(sectors)), factors_(std::move(factors)) {
    std::size_t n = 0;
    for (auto& s : sectors_) {
      if (s.empty()) throw Error(Errc::invalid_dimension, "empty sector");
      std::sort(s.begin(), s.end());
      n += s.size();
    }
    locations_.assign(n, Location{n, 0});
    for (std::size_t si = 0; si < sectors_.size(); ++si)
      for (std::size_t k = 0; k < sectors_[si].size(); ++k) {
        const std::size_t idx = sectors_[si][k];
        if (idx >= n || locations_[idx].sector != n)
          throw Error(Errc::invalid_dimension, "sectors must partition the basis indices");
        locations_[idx] = Location{si, k};
      }
    if (kind_ == SystemKind::quantum && sectors_.size() != 1)
      throw Error(Errc::invalid_dimension, "quantum systems have exactly one sector");
    if ((kind_ == SystemKind::classical || kind_ == SystemKind::coherent) &&
        sectors_.size() != n)
      throw Error(Errc::invalid_dimension, "classical and coherent systems have singleton sectors");
  }

  static void require_positive(std::size_t d) {
    if (d == 0) throw Error(Errc::invalid_dimension, "dimension must be at least 1");
  }

  static std::vector<Sector> singletons(std::size_t d) {
    std::vector<Sector> out(d);
    for (std::size_t i = 0; i < d; ++i) out[i] = {i};
    return out;
  }

  SystemKind kind_;
  Field field_;
  std::vector<Sector> sectors_;
  std::shared_ptr<const Factors> factors_;
  std::vector<Location> locations_;
};

/// Composite system A (x) B.
///
/// When neither factor has coherent labels, sectors are the products
/// S_a (x) S_b ordered a-major (quantum (x) quantum gives one sector, X (x)
/// classical(d) gives d copies of X's structure). When either factor has
/// coherent labels the offset rule applies to the sector labels: with m_A and
/// m_B labels there are max(m_A, m_B) sectors and sector delta collects the
/// label pairs (a, (a + delta) mod m_B) for m_A <= m_B, or
/// ((b - delta) mod m_A, b) otherwise, each pair contributing S_a (x) S_b.
inline SystemDescriptor compose(const SystemDescriptor& a, const SystemDescriptor& b) {
  if (a.field() != b.field())
    throw Error(Errc::unsupported_composite,
                "cannot compose a real-field and a complex-field system (" + a.label() + ", " +
                    b.label() + ")");
  const std::size_t nb = b.dim();
  auto block = [&](std::size_t sa, std::size_t sb, SystemDescriptor::Sector& out) {
    for (std::size_t i : a.sectors()[sa])
      for (std::size_t j : b.sectors()[sb]) out.push_back(i * nb + j);
  };

  std::vector<SystemDescriptor::Sector> sectors;
  const std::size_t ma = a.sector_count();
  const std::size_t mb = b.sector_count();
  if (a.coherent_labels() || b.coherent_labels()) {
    const std::size_t m = std::max(ma, mb);
    for (std::size_t delta = 0; delta < m; ++delta) {
      SystemDescriptor::Sector s;
      if (ma <= mb) {
        for (std::size_t x = 0; x < ma; ++x) block(x, (x + delta) % mb, s);
      } else {
        for (std::size_t y = 0; y < mb; ++y) block(((y + ma) - delta % ma) % ma, y, s);
      }
      sectors.push_back(std::move(s));
    }
  } else {
    for (std::size_t x = 0; x < ma; ++x)
      for (std::size_t y = 0; y < mb; ++y) {
        SystemDescriptor::Sector s;
        block(x, y, s);
        sectors.push_back(std::move(s));
      }
  }
  auto factors = std::make_shared<const SystemDescriptor::Factors>(SystemDescriptor::Factors{a, b});
  return SystemDescriptor(SystemKind::composite, a.field(), std::move(sectors), std::move(factors));
}

}  // namespace sharp
