#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rgym/core/rng.hpp"

namespace rgym::envs {

enum class GridAction : std::size_t { Up = 0, Down = 1, Left = 2, Right = 3 };
inline constexpr std::size_t kGridActions = 4;

struct Cell {
  std::size_t x = 0;
  std::size_t y = 0;

  bool operator==(const Cell&) const = default;
};

/// Rectangular board; cells are indexed row-major (`y * width + x`) with
/// (0, 0) in the top-left corner and Up decreasing y.
class Board {
 public:
  Board() = default;
  Board(std::size_t width, std::size_t height);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t cells() const noexcept { return width_ * height_; }

  std::size_t index(Cell c) const noexcept { return c.y * width_ + c.x; }
  Cell cell(std::size_t index) const noexcept { return {index % width_, index / width_}; }

  bool is_wall(std::size_t index) const { return walls_.at(index); }
  void set_wall(std::size_t index, bool wall = true) { walls_.at(index) = wall; }
  const std::set<std::size_t>& hazards() const noexcept { return hazards_; }
  void set_hazards(std::set<std::size_t> h) { hazards_ = std::move(h); }
  bool is_hazard(std::size_t index) const { return hazards_.contains(index); }

  std::optional<std::size_t> start;
  std::optional<std::size_t> goal;

  // Deterministic move; walls and edges leave the cell unchanged.
  std::size_t move(std::size_t from, GridAction a) const noexcept;

  // Renders back to the text map format.
  std::string to_text() const;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<bool> walls_;
  std::set<std::size_t> hazards_;
};

// Parses rows of '#' wall, 'S' start, 'G' goal, 'H' hazard, '.' open.
// Blank lines are skipped. Throws ConfigError with a line diagnostic.
Board parse_board(std::string_view text);

// Open width x height board, start top-left, goal bottom-right.
Board open_board(std::size_t width, std::size_t height);

/// With probability 1 - slip the intended move executes; otherwise a
/// uniformly random action does.
std::size_t maze_transition(const Board& board, std::size_t cell, GridAction action, double slip,
                            Rng& rng);

}  // namespace rgym::envs
