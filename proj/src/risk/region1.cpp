#include "risk/region1.hpp"

#include <algorithm>
#include <cmath>

#include "core/bits.hpp"
#include "core/error.hpp"

namespace lab::risk {

namespace {

using Piece = Region1::Piece;

bool piece_nonempty(const Piece& p) {
  if (p.lo < p.hi) return true;
  return p.lo == p.hi && !p.lo_open && !p.hi_open;
}

// Pieces a (starting no later than b) can be fused when they overlap or touch
// with at least one closed endpoint at the junction.
bool mergeable(const Piece& a, const Piece& b) {
  if (b.lo < a.hi) return true;
  if (b.lo == a.hi) return !a.hi_open || !b.lo_open;
  return false;
}

Piece fuse(const Piece& a, const Piece& b) {
  Piece out = a;
  if (b.lo < out.lo || (b.lo == out.lo && !b.lo_open)) {
    out.lo = b.lo;
    out.lo_open = (b.lo == a.lo) ? (a.lo_open && b.lo_open) : b.lo_open;
  }
  if (b.hi > out.hi || (b.hi == out.hi && !b.hi_open)) {
    bool same = b.hi == a.hi;
    out.hi = b.hi;
    out.hi_open = same ? (a.hi_open && b.hi_open) : b.hi_open;
  }
  return out;
}

}  // namespace

Region1::Region1(std::vector<Piece> pieces) {
  std::vector<Piece> kept;
  kept.reserve(pieces.size());
  for (const Piece& p : pieces) {
    require(std::isfinite(p.lo) && std::isfinite(p.hi), errc::invalid_argument,
            "Region1: non-finite endpoint");
    require(p.lo <= p.hi, errc::invalid_argument, "Region1: inverted piece");
    if (piece_nonempty(p)) kept.push_back(p);
  }
  std::sort(kept.begin(), kept.end(), [](const Piece& a, const Piece& b) {
    if (a.lo != b.lo) return a.lo < b.lo;
    if (a.lo_open != b.lo_open) return !a.lo_open;  // closed start first
    return a.hi < b.hi;
  });
  for (const Piece& p : kept) {
    if (!pieces_.empty() && mergeable(pieces_.back(), p))
      pieces_.back() = fuse(pieces_.back(), p);
    else
      pieces_.push_back(p);
  }
}

Region1 Region1::segment(double lo, double hi) { return Region1({Piece{lo, hi, false, false}}); }

bool Region1::contains(double x) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                             [](double v, const Piece& p) { return v < p.lo; });
  if (it == pieces_.begin()) return false;
  --it;
  bool above = x > it->lo || (x == it->lo && !it->lo_open);
  bool below = x < it->hi || (x == it->hi && !it->hi_open);
  return above && below;
}

double Region1::measure() const {
  double total = 0.0;
  for (const Piece& p : pieces_) total += p.hi - p.lo;
  return total;
}

Region1 Region1::unite(const Region1& other) const {
  std::vector<Piece> all = pieces_;
  all.insert(all.end(), other.pieces_.begin(), other.pieces_.end());
  return Region1(std::move(all));
}

Region1 Region1::intersect(const Region1& other) const {
  std::vector<Piece> out;
  std::size_t i = 0, j = 0;
  while (i < pieces_.size() && j < other.pieces_.size()) {
    const Piece& a = pieces_[i];
    const Piece& b = other.pieces_[j];
    Piece p;
    if (a.lo > b.lo) {
      p.lo = a.lo;
      p.lo_open = a.lo_open;
    } else if (b.lo > a.lo) {
      p.lo = b.lo;
      p.lo_open = b.lo_open;
    } else {
      p.lo = a.lo;
      p.lo_open = a.lo_open || b.lo_open;
    }
    if (a.hi < b.hi) {
      p.hi = a.hi;
      p.hi_open = a.hi_open;
    } else if (b.hi < a.hi) {
      p.hi = b.hi;
      p.hi_open = b.hi_open;
    } else {
      p.hi = a.hi;
      p.hi_open = a.hi_open || b.hi_open;
    }
    if (p.lo < p.hi || (p.lo == p.hi && !p.lo_open && !p.hi_open)) out.push_back(p);
    if (a.hi < b.hi || (a.hi == b.hi && a.hi_open && !b.hi_open))
      ++i;
    else if (b.hi < a.hi || (a.hi == b.hi && b.hi_open && !a.hi_open))
      ++j;
    else {
      ++i;
      ++j;
    }
  }
  return Region1(std::move(out));
}

Region1 Region1::complement(double lo, double hi) const {
  require(lo <= hi, errc::invalid_argument, "Region1::complement: inverted bounds");
  Region1 clipped = intersect(segment(lo, hi));
  std::vector<Piece> out;
  double cursor = lo;
  bool cursor_open = false;  // complement currently includes the cursor point
  for (const Piece& p : clipped.pieces_) {
    Piece gap{cursor, p.lo, cursor_open, !p.lo_open};
    if (piece_nonempty(gap)) out.push_back(gap);
    cursor = p.hi;
    cursor_open = !p.hi_open;
  }
  Piece tail{cursor, hi, cursor_open, false};
  if (piece_nonempty(tail)) out.push_back(tail);
  return Region1(std::move(out));
}

Region1 Region1::dilate(double gamma) const {
  require(gamma >= 0.0, errc::invalid_argument, "Region1::dilate: gamma must be >= 0");
  if (gamma == 0.0) return *this;
  std::vector<Piece> out = pieces_;
  for (Piece& p : out) {
    // A point swells to a closed interval; interval openness is preserved.
    bool was_point = p.is_point();
    p.lo -= gamma;
    p.hi += gamma;
    if (was_point) {
      p.lo_open = false;
      p.hi_open = false;
    }
  }
  return Region1(std::move(out));
}

Region1 decision_region_one(const learn::UnionOfIntervals& h) {
  learn::validate(h);
  std::vector<Piece> pieces;
  pieces.reserve(h.intervals.size());
  for (const auto& iv : h.intervals) pieces.push_back({iv.lo, iv.hi, iv.lo_open, iv.hi_open});
  return Region1(std::move(pieces));
}

Region1 decision_region_one(const learn::ParityHypothesis& h, double lo, double hi) {
  require(!h.planar, errc::invalid_argument, "decision_region_one: need a 1-D parity hypothesis");
  require(lo <= hi, errc::invalid_argument, "decision_region_one: inverted bounds");
  std::vector<Piece> pieces;
  auto first = static_cast<std::int64_t>(std::floor(lo + 0.5));
  auto last = static_cast<std::int64_t>(std::ceil(hi + 0.5));
  for (std::int64_t i = first; i <= last; ++i) {
    if (h.predict1d(static_cast<double>(i)) == 1)
      // Half-away-from-zero rounding sends [i-0.5, i+0.5) to i on the
      // positive axis.
      pieces.push_back({static_cast<double>(i) - 0.5, static_cast<double>(i) + 0.5, false, true});
  }
  return Region1(std::move(pieces)).intersect(Region1::segment(lo, hi));
}

Region1 decision_region_one(const learn::LinearClassifier& h, double lo, double hi) {
  require(h.w.size() == 1, errc::invalid_argument, "decision_region_one: need a 1-D linear classifier");
  learn::validate(h);
  double w = h.w[0];
  double boundary = -h.bias / w;
  std::vector<Piece> pieces;
  if (w > 0.0)
    pieces.push_back({boundary, hi, true, false});
  else
    pieces.push_back({lo, boundary, false, true});
  Region1 half(std::move(pieces));
  return half.intersect(Region1::segment(lo, hi));
}

Region1 decision_region_one(const learn::NearestNeighbor& h, double lo, double hi) {
  require(h.stored.dim() == 1, errc::invalid_argument, "decision_region_one: need 1-D stored data");
  require(!h.stored.empty(), errc::invalid_argument, "decision_region_one: empty store");

  struct Entry {
    double x;
    std::size_t index;
    int label;
  };
  std::vector<Entry> entries;
  entries.reserve(h.stored.size());
  for (std::size_t i = 0; i < h.stored.size(); ++i)
    entries.push_back({h.stored[i].x[0], i, h.stored[i].label});
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.x != b.x) return a.x < b.x;
    return a.index < b.index;  // tie toward the lowest stored index
  });

  std::vector<Piece> pieces;
  double cursor = lo;
  bool cursor_open = false;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    bool last = i + 1 == entries.size();
    double next_boundary = last ? hi : 0.5 * (entries[i].x + entries[i + 1].x);
    bool same_label = !last && entries[i].label == entries[i + 1].label;
    // The exact midpoint ties; the lower stored index wins it. With equal
    // labels on both sides the point is in the run either way.
    bool mid_belongs_left = !last && (same_label || entries[i].index < entries[i + 1].index);
    if (entries[i].label == 1) {
      Piece p{cursor, next_boundary, cursor_open, !last && !mid_belongs_left};
      if (p.lo <= p.hi && piece_nonempty(p)) pieces.push_back(p);
    }
    cursor = next_boundary;
    cursor_open = !last && !same_label && mid_belongs_left;
  }
  return Region1(std::move(pieces)).intersect(Region1::segment(lo, hi));
}

}  // namespace lab::risk
