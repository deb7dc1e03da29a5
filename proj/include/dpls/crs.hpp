#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "dpls/field.hpp"
#include "dpls/lattice.hpp"

namespace dpls {

/// Valid cells sorted by |Y - mu0| descending; ties keep ascending cell order.
struct CandidateOrder {
  std::vector<CellIndex> perm;
  std::vector<double> key;  // |Y - mu0| along perm, non-increasing
};

CandidateOrder sort_candidates(const Field& field, double mu0);

/// Shape used to carve candidate regions around a centre. Offsets are centre-relative.
class BallShape {
 public:
  virtual ~BallShape() = default;
  virtual bool contains(std::span<const int> offset) const = 0;
  /// Largest |offset_i| any member can have on a single axis.
  virtual int reach() const = 0;
};

/// Closed Euclidean ball: sum of squared offsets <= floor(radius^2).
class EuclideanBall : public BallShape {
 public:
  explicit EuclideanBall(double radius);
  /// Builds the ball straight from radius^2, which avoids a square root round trip.
  static EuclideanBall from_squared(double radius_sq);

  bool contains(std::span<const int> offset) const override;
  int reach() const override;
  std::int64_t squared_bound() const { return bound_; }

 private:
  EuclideanBall() = default;
  std::int64_t bound_ = 0;
};

/// Lattice points of the closed ball around `center`, clipped to the grid.
Region ball(const GridSpec& grid, const Point& center, double radius);

/// (n * Gamma(d/2 + 1) / (m * pi^(d/2)))^(1/d); sqrt(n / (m pi)) for d = 2.
double crs_radius(const GridSpec& grid, int m);
double crs_radius(std::size_t d, double n, int m);
/// Square of the same radius, computed without the root for d = 2.
double crs_radius_squared(std::size_t d, double n, int m);

struct CrsOutcome {
  std::vector<Region> kept;
  std::vector<Region> discarded;
  int iterations = 0;
};

/// Regions carved from the first N candidates: up to m balls of size >= xi, each centred
/// at the most deviant candidate still unassigned. Uses the grid's own n for the radius.
std::vector<Region> crs(const CandidateOrder& order, CellIndex N, int m, double xi, const GridSpec& grid);
CrsOutcome crs_detailed(const CandidateOrder& order, CellIndex N, int m, double xi, const GridSpec& grid);

/// Reusable state for many CRS runs that share an order, a grid and a shape.
class CrsEngine {
 public:
  CrsEngine(const CandidateOrder& order, const GridSpec& grid, std::shared_ptr<const BallShape> shape);

  /// Runs one carve over the first N candidates. Cells of each region come out sorted.
  /// When `discarded` is null the discarded balls are not materialised.
  int run(CellIndex N, int m, double xi, std::vector<std::vector<CellIndex>>& kept,
          std::vector<std::vector<CellIndex>>* discarded = nullptr);

 private:
  void carve(std::size_t centre_rank, CellIndex N, std::vector<CellIndex>& out);

  const CandidateOrder& order_;
  GridSpec grid_;
  std::shared_ptr<const BallShape> shape_;
  std::vector<std::int64_t> rank_of_;   // per cell, -1 when not a candidate
  std::vector<int> coords_;             // d ints per rank
  std::vector<int> stencil_;            // d ints per offset
  std::vector<std::uint32_t> dead_;     // per rank, equals stamp_ once consumed
  std::uint32_t stamp_ = 0;
};

}  // namespace dpls
