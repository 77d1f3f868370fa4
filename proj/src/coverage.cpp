#include "sappo/coverage.hpp"

#include <algorithm>

#include "sappo/error.hpp"

namespace sappo {

CoverageGrid::CoverageGrid(Vec2 origin, double cell_size, int rows, int cols, int min_beacons)
    : origin_(origin),
      cell_size_(cell_size),
      rows_(rows),
      cols_(cols),
      min_beacons_(min_beacons),
      counts_(static_cast<std::size_t>(rows) * cols, 0),
      covered_(counts_.size(), 0),
      inside_(counts_.size(), 0) {}

Vec2 CoverageGrid::cell_center(int row, int col) const {
  return {origin_.x + (col + 0.5) * cell_size_, origin_.y + (row + 0.5) * cell_size_};
}

void CoverageGrid::set(int row, int col, bool inside, int count, bool covered) {
  const auto i = index(row, col);
  inside_[i] = inside ? 1 : 0;
  counts_[i] = static_cast<std::uint8_t>(std::clamp(count, 0, 127));
  covered_[i] = covered ? 1 : 0;
}

std::string CoverageGrid::to_pgm() const {
  std::string out = "P5\n" + std::to_string(cols_) + " " + std::to_string(rows_) + "\n255\n";
  out.reserve(out.size() + counts_.size());
  for (int row = rows_ - 1; row >= 0; --row) {
    for (int col = 0; col < cols_; ++col) {
      const auto i = index(row, col);
      const int value = covered_[i] ? 128 + counts_[i] : 0;
      out.push_back(static_cast<char>(static_cast<unsigned char>(value)));
    }
  }
  return out;
}

bool beacon_reaches(const Room& room, const CoverageBeacon& beacon, Vec2 p) {
  const Vec2 rel = p - beacon.position;
  const double dist = norm(rel);
  if (dist > beacon.range) return false;
  if (dist > 0.0 && beacon.arc < 2.0 * kPi) {
    const double off = std::abs(wrap_angle(heading_of(rel) - beacon.axis));
    if (off > beacon.arc / 2.0 + 1e-12) return false;
  }
  return !room.blocks(beacon.position, p);
}

CoverageGrid coverage_map(const Room& room, std::span<const CoverageBeacon> beacons,
                          int min_beacons, double cell_size) {
  if (room.empty()) throw Error(ErrorCode::invalid_room, "coverage needs a room");
  if (!(cell_size > 0.0)) throw Error(ErrorCode::domain, "cell size must be positive");
  if (min_beacons < 0) throw Error(ErrorCode::domain, "min_beacons must be non-negative");

  const auto [lo, hi] = room.bounds();
  const int cols = std::max(1, static_cast<int>(std::ceil((hi.x - lo.x) / cell_size - 1e-9)));
  const int rows = std::max(1, static_cast<int>(std::ceil((hi.y - lo.y) / cell_size - 1e-9)));
  CoverageGrid grid(lo, cell_size, rows, cols, min_beacons);

  for (int row = 0; row < rows; ++row) {
    for (int col = 0; col < cols; ++col) {
      const Vec2 p = grid.cell_center(row, col);
      if (!room.contains(p)) continue;
      int count = 0;
      for (const auto& b : beacons) {
        if (beacon_reaches(room, b, p)) ++count;
      }
      grid.set(row, col, true, count, count >= min_beacons);
    }
  }
  return grid;
}

double covered_area(const CoverageGrid& grid) {
  std::size_t n = 0;
  for (int row = 0; row < grid.rows(); ++row) {
    for (int col = 0; col < grid.cols(); ++col) {
      if (grid.covered(row, col)) ++n;
    }
  }
  return static_cast<double>(n) * grid.cell_size() * grid.cell_size();
}

}  // namespace sappo
