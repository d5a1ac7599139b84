#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace srgvf {

enum class Action : std::uint8_t { up, down, left, right };

inline constexpr std::array<Action, 4> all_actions{Action::up, Action::down, Action::left, Action::right};

char action_glyph(Action a);

struct Cell {
    int x = 0;  // column
    int y = 0;  // row, 0 at the top
    friend bool operator==(const Cell&, const Cell&) = default;
};

class MapParseError : public std::invalid_argument {
public:
    MapParseError(int line, int column, const std::string& what);
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

/// Deterministic maze with a hand-coded policy arrow on every open non-goal cell.
///
/// Open cells (including start and goal) are numbered row-major from 0;
/// the goal is a terminal state with its own index.
class GridMap {
public:
    GridMap(int width, int height, std::vector<bool> walls, Cell start, Cell goal,
            std::vector<std::optional<Action>> policy);

    int width() const { return width_; }
    int height() const { return height_; }
    Cell start() const { return start_; }
    Cell goal() const { return goal_; }

    bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
    bool is_wall(Cell c) const { return walls_[flat(c)]; }
    bool is_open(Cell c) const { return in_bounds(c) && !is_wall(c); }
    std::optional<Action> policy(Cell c) const { return policy_[flat(c)]; }

    std::size_t state_count() const { return cells_.size(); }
    std::size_t state_index(Cell c) const;
    Cell cell_of(std::size_t index) const { return cells_.at(index); }
    std::size_t start_index() const { return state_index(start_); }
    std::size_t goal_index() const { return state_index(goal_); }

    /// Canonical two-block map text; load_map(to_text()) reproduces the map.
    std::string to_text() const;
    /// FNV-1a of to_text(), for tagging cached references.
    std::uint64_t hash() const;

private:
    std::size_t flat(Cell c) const { return static_cast<std::size_t>(c.y) * width_ + c.x; }

    int width_;
    int height_;
    std::vector<bool> walls_;
    Cell start_;
    Cell goal_;
    std::vector<std::optional<Action>> policy_;
    std::vector<Cell> cells_;
    std::vector<std::int64_t> index_of_;
};

/// Parses the layout block and the policy block (separated by one blank
/// line). Throws MapParseError with the 1-based line/column of the first
/// violation.
GridMap load_map(std::string_view text);
GridMap load_map_file(const std::string& path);

struct GridState {
    Cell position;
    std::int64_t episode_step = 0;
};

struct StepResult {
    GridState next;
    bool terminal = false;
};

/// Moves one cell; walls and the border leave the position unchanged.
StepResult step(const GridMap& map, const GridState& state, Action action);

/// With probability 1 - epsilon the policy arrow, otherwise uniform over all four actions.
Action select_action(const GridMap& map, const GridState& state, double epsilon, std::mt19937_64& rng);

/// Exact epsilon-greedy Markov chain over state indices; the goal row is zero.
Eigen::MatrixXd transition_matrix(const GridMap& map, double epsilon);

/// Probability of each action under epsilon-greedy at a non-goal cell.
std::array<double, 4> action_probabilities(const GridMap& map, Cell cell, double epsilon);

/// Maps shipped with the repository, generated rather than hand-edited.
/// Arrows follow a shortest path to the goal, ties broken up, right, down, left.
GridMap make_open_map(int width, int height, Cell start, Cell goal);
GridMap make_dayan_map();
GridMap with_shortest_path_policy(int width, int height, std::vector<bool> walls, Cell start, Cell goal);

}  // namespace srgvf
