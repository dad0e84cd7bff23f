#include "rgym/envs/board.hpp"

#include <sstream>

#include "rgym/core/errors.hpp"

namespace rgym::envs {

Board::Board(std::size_t width, std::size_t height)
    : width_(width), height_(height), walls_(width * height, false) {
  if (width == 0 || height == 0) throw ConfigError("board must be at least 1x1");
}

std::size_t Board::move(std::size_t from, GridAction a) const noexcept {
  Cell c = cell(from);
  switch (a) {
    case GridAction::Up:
      if (c.y == 0) return from;
      --c.y;
      break;
    case GridAction::Down:
      if (c.y + 1 >= height_) return from;
      ++c.y;
      break;
    case GridAction::Left:
      if (c.x == 0) return from;
      --c.x;
      break;
    case GridAction::Right:
      if (c.x + 1 >= width_) return from;
      ++c.x;
      break;
  }
  const std::size_t to = index(c);
  return walls_[to] ? from : to;
}

std::string Board::to_text() const {
  std::string out;
  for (std::size_t y = 0; y < height_; ++y) {
    for (std::size_t x = 0; x < width_; ++x) {
      const std::size_t i = index({x, y});
      char ch = '.';
      if (walls_[i]) ch = '#';
      else if (start == i) ch = 'S';
      else if (goal == i) ch = 'G';
      else if (hazards_.contains(i)) ch = 'H';
      out += ch;
    }
    out += '\n';
  }
  return out;
}

Board parse_board(std::string_view text) {
  std::vector<std::string> rows;
  std::vector<std::size_t> line_numbers;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t");
    rows.push_back(line.substr(first, last - first + 1));
    line_numbers.push_back(line_no);
  }
  if (rows.empty()) throw ConfigError("map", "empty board");

  const std::size_t width = rows.front().size();
  Board board(width, rows.size());
  std::set<std::size_t> hazards;
  for (std::size_t y = 0; y < rows.size(); ++y) {
    const std::string where = "map line " + std::to_string(line_numbers[y]);
    if (rows[y].size() != width)
      throw ConfigError(where, "row width " + std::to_string(rows[y].size()) + " != " +
                                   std::to_string(width));
    for (std::size_t x = 0; x < width; ++x) {
      const std::size_t i = board.index({x, y});
      switch (rows[y][x]) {
        case '.': break;
        case '#': board.set_wall(i); break;
        case 'H': hazards.insert(i); break;
        case 'S':
          if (board.start) throw ConfigError(where, "second start cell");
          board.start = i;
          break;
        case 'G':
          if (board.goal) throw ConfigError(where, "second goal cell");
          board.goal = i;
          break;
        default:
          throw ConfigError(where, std::string("unknown map character '") + rows[y][x] + "'");
      }
    }
  }
  board.set_hazards(std::move(hazards));
  return board;
}

Board open_board(std::size_t width, std::size_t height) {
  Board b(width, height);
  b.start = 0;
  b.goal = b.cells() - 1;
  return b;
}

std::size_t maze_transition(const Board& board, std::size_t cell, GridAction action, double slip,
                            Rng& rng) {
  if (slip > 0.0 && rng.bernoulli(slip)) action = static_cast<GridAction>(rng.index(kGridActions));
  return board.move(cell, action);
}

}  // namespace rgym::envs
