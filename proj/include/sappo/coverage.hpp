#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sappo/geometry.hpp"

namespace sappo {

/// Horizontal coverage footprint of one beacon: a circular sector.
struct CoverageBeacon {
  Vec2 position;
  double axis = 0.0;          // radians
  double arc = kPi / 2.0;     // radians, up to 2*pi
  double range = 9.0;         // meters
};

class CoverageGrid {
 public:
  CoverageGrid(Vec2 origin, double cell_size, int rows, int cols, int min_beacons);

  Vec2 origin() const { return origin_; }
  double cell_size() const { return cell_size_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int min_beacons() const { return min_beacons_; }

  Vec2 cell_center(int row, int col) const;
  /// Number of beacons reaching the cell (0 for cells outside the room).
  int count(int row, int col) const { return counts_[index(row, col)]; }
  bool covered(int row, int col) const { return covered_[index(row, col)] != 0; }
  bool inside(int row, int col) const { return inside_[index(row, col)] != 0; }

  void set(int row, int col, bool inside, int count, bool covered);

  /// Binary PGM, top row = largest y. 0 uncovered, 128+k covered by k beacons.
  std::string to_pgm() const;

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(col);
  }

  Vec2 origin_;
  double cell_size_;
  int rows_;
  int cols_;
  int min_beacons_;
  std::vector<std::uint8_t> counts_;
  std::vector<std::uint8_t> covered_;
  std::vector<std::uint8_t> inside_;
};

/// True when p lies inside the beacon's sector and the straight segment to it
/// does not cross a wall.
bool beacon_reaches(const Room& room, const CoverageBeacon& beacon, Vec2 p);

CoverageGrid coverage_map(const Room& room, std::span<const CoverageBeacon> beacons,
                          int min_beacons, double cell_size = 0.05);

double covered_area(const CoverageGrid& grid);

}  // namespace sappo
