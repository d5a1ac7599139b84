#include "srgvf/gridworld.hpp"

#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace srgvf {

namespace {

Cell moved(Cell c, Action a)
{
    switch (a) {
    case Action::up:
        return {c.x, c.y - 1};
    case Action::down:
        return {c.x, c.y + 1};
    case Action::left:
        return {c.x - 1, c.y};
    case Action::right:
        return {c.x + 1, c.y};
    }
    return c;
}

std::optional<Action> arrow_action(char ch)
{
    switch (ch) {
    case '^':
        return Action::up;
    case 'v':
        return Action::down;
    case '<':
        return Action::left;
    case '>':
        return Action::right;
    default:
        return std::nullopt;
    }
}

std::vector<std::string> split_lines(std::string_view text)
{
    std::vector<std::string> lines;
    std::string current;
    for (char ch : text) {
        if (ch == '\n') {
            lines.push_back(current);
            current.clear();
        } else {
            current.push_back(ch);
        }
    }
    if (!current.empty())
        lines.push_back(current);
    for (auto& line : lines) {
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r'))
            line.pop_back();
    }
    return lines;
}

}  // namespace

char action_glyph(Action a)
{
    switch (a) {
    case Action::up:
        return '^';
    case Action::down:
        return 'v';
    case Action::left:
        return '<';
    case Action::right:
        return '>';
    }
    return '?';
}

MapParseError::MapParseError(int line, int column, const std::string& what)
    : std::invalid_argument("map line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
      line_(line),
      column_(column)
{
}

GridMap::GridMap(int width, int height, std::vector<bool> walls, Cell start, Cell goal,
                 std::vector<std::optional<Action>> policy)
    : width_(width), height_(height), walls_(std::move(walls)), start_(start), goal_(goal), policy_(std::move(policy))
{
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("grid map: dimensions must be positive");
    const auto n = static_cast<std::size_t>(width) * height;
    if (walls_.size() != n || policy_.size() != n)
        throw std::invalid_argument("grid map: cell arrays do not match dimensions");
    if (!is_open(start_) || !is_open(goal_))
        throw std::invalid_argument("grid map: start and goal must be open cells");
    if (start_ == goal_)
        throw std::invalid_argument("grid map: start and goal coincide");

    index_of_.assign(n, -1);
    for (int y = 0; y < height_; ++y) {
        for (int x = 0; x < width_; ++x) {
            const Cell c{x, y};
            if (is_wall(c)) {
                if (policy_[flat(c)])
                    throw std::invalid_argument("grid map: policy arrow on a wall");
                continue;
            }
            if (c == goal_) {
                policy_[flat(c)].reset();
            } else if (!policy_[flat(c)]) {
                throw std::invalid_argument("grid map: open cell (" + std::to_string(x) + ", " + std::to_string(y) +
                                            ") has no policy action");
            }
            index_of_[flat(c)] = static_cast<std::int64_t>(cells_.size());
            cells_.push_back(c);
        }
    }
}

std::size_t GridMap::state_index(Cell c) const
{
    if (!in_bounds(c) || index_of_[flat(c)] < 0)
        throw std::out_of_range("grid map: (" + std::to_string(c.x) + ", " + std::to_string(c.y) +
                                ") is not an open cell");
    return static_cast<std::size_t>(index_of_[flat(c)]);
}

std::string GridMap::to_text() const
{
    std::string out;
    for (int y = 0; y < height_; ++y) {
        for (int x = 0; x < width_; ++x) {
            const Cell c{x, y};
            out.push_back(is_wall(c) ? '#' : c == start_ ? 'S' : c == goal_ ? 'G' : '.');
        }
        out.push_back('\n');
    }
    out.push_back('\n');
    for (int y = 0; y < height_; ++y) {
        for (int x = 0; x < width_; ++x) {
            const Cell c{x, y};
            out.push_back(is_wall(c) ? '#' : c == goal_ ? 'G' : action_glyph(*policy(c)));
        }
        out.push_back('\n');
    }
    return out;
}

std::uint64_t GridMap::hash() const
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : to_text()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

GridMap load_map(std::string_view text)
{
    const auto lines = split_lines(text);

    std::size_t first = 0;
    while (first < lines.size() && lines[first].empty())
        ++first;
    std::size_t blank = first;
    while (blank < lines.size() && !lines[blank].empty())
        ++blank;
    if (first == lines.size())
        throw MapParseError(1, 1, "empty map");
    if (blank == lines.size())
        throw MapParseError(static_cast<int>(lines.size()), 1, "missing policy block");
    if (blank + 1 < lines.size() && lines[blank + 1].empty())
        throw MapParseError(static_cast<int>(blank + 2), 1, "blocks must be separated by exactly one blank line");

    const std::size_t height = blank - first;
    const std::size_t width = lines[first].size();
    const std::size_t policy_first = blank + 1;
    std::size_t policy_end = policy_first;
    while (policy_end < lines.size() && !lines[policy_end].empty())
        ++policy_end;
    for (std::size_t k = policy_end; k < lines.size(); ++k)
        if (!lines[k].empty())
            throw MapParseError(static_cast<int>(k + 1), 1, "unexpected content after policy block");
    if (policy_end - policy_first != height)
        throw MapParseError(static_cast<int>(policy_end + 1), 1,
                            "policy block has " + std::to_string(policy_end - policy_first) + " rows, expected " +
                                std::to_string(height));

    const auto n = width * height;
    std::vector<bool> walls(n, false);
    std::vector<std::optional<Action>> policy(n);
    std::optional<Cell> start, goal;

    for (std::size_t y = 0; y < height; ++y) {
        const auto& row = lines[first + y];
        const int line_no = static_cast<int>(first + y + 1);
        if (row.size() != width)
            throw MapParseError(line_no, static_cast<int>(std::min(row.size(), width) + 1), "ragged rows");
        for (std::size_t x = 0; x < width; ++x) {
            const Cell c{static_cast<int>(x), static_cast<int>(y)};
            const int col = static_cast<int>(x + 1);
            switch (row[x]) {
            case '#':
                walls[y * width + x] = true;
                break;
            case '.':
                break;
            case 'S':
                if (start)
                    throw MapParseError(line_no, col, "duplicate start");
                start = c;
                break;
            case 'G':
                if (goal)
                    throw MapParseError(line_no, col, "duplicate goal");
                goal = c;
                break;
            default:
                throw MapParseError(line_no, col, std::string("unknown glyph '") + row[x] + "'");
            }
        }
    }
    if (!start)
        throw MapParseError(static_cast<int>(first + 1), 1, "missing start");
    if (!goal)
        throw MapParseError(static_cast<int>(first + 1), 1, "missing goal");

    for (std::size_t y = 0; y < height; ++y) {
        const auto& row = lines[policy_first + y];
        const int line_no = static_cast<int>(policy_first + y + 1);
        if (row.size() != width)
            throw MapParseError(line_no, static_cast<int>(std::min(row.size(), width) + 1), "ragged rows");
        for (std::size_t x = 0; x < width; ++x) {
            const int col = static_cast<int>(x + 1);
            const char ch = row[x];
            const bool wall = walls[y * width + x];
            const bool is_goal = goal->x == static_cast<int>(x) && goal->y == static_cast<int>(y);
            if (ch == '#' || ch == 'G') {
                if (ch == '#' && !wall)
                    throw MapParseError(line_no, col, "open cell without policy arrow");
                if (ch == 'G' && !is_goal)
                    throw MapParseError(line_no, col, "'G' in policy block does not match the goal");
                continue;
            }
            const auto a = arrow_action(ch);
            if (!a)
                throw MapParseError(line_no, col, std::string("unknown glyph '") + ch + "'");
            if (wall)
                throw MapParseError(line_no, col, "policy arrow on a wall");
            if (is_goal)
                throw MapParseError(line_no, col, "policy arrow on the goal");
            policy[y * width + x] = a;
        }
        for (std::size_t x = 0; x < width; ++x) {
            const bool is_goal = goal->x == static_cast<int>(x) && goal->y == static_cast<int>(y);
            if (!walls[y * width + x] && !is_goal && !policy[y * width + x])
                throw MapParseError(line_no, static_cast<int>(x + 1), "open cell without policy arrow");
            if (is_goal && row[x] != 'G')
                throw MapParseError(line_no, static_cast<int>(x + 1), "goal must be marked 'G' in policy block");
        }
    }

    return GridMap(static_cast<int>(width), static_cast<int>(height), std::move(walls), *start, *goal,
                   std::move(policy));
}

GridMap load_map_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open map file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return load_map(ss.str());
}

StepResult step(const GridMap& map, const GridState& state, Action action)
{
    Cell next = moved(state.position, action);
    if (!map.is_open(next))
        next = state.position;
    return {GridState{next, state.episode_step + 1}, next == map.goal()};
}

Action select_action(const GridMap& map, const GridState& state, double epsilon, std::mt19937_64& rng)
{
    if (!(epsilon >= 0.0 && epsilon <= 1.0))
        throw std::invalid_argument("select_action: epsilon must lie in [0, 1]");
    const auto arrow = map.policy(state.position);
    if (!arrow)
        throw std::logic_error("select_action: no policy at the goal");
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < epsilon) {
        std::uniform_int_distribution<int> pick(0, 3);
        return all_actions[static_cast<std::size_t>(pick(rng))];
    }
    return *arrow;
}

std::array<double, 4> action_probabilities(const GridMap& map, Cell cell, double epsilon)
{
    std::array<double, 4> p{};
    p.fill(epsilon / 4.0);
    const auto arrow = map.policy(cell);
    if (!arrow)
        throw std::logic_error("action_probabilities: no policy at the goal");
    p[static_cast<std::size_t>(*arrow)] += 1.0 - epsilon;
    return p;
}

Eigen::MatrixXd transition_matrix(const GridMap& map, double epsilon)
{
    if (!(epsilon >= 0.0 && epsilon <= 1.0))
        throw std::invalid_argument("transition_matrix: epsilon must lie in [0, 1]");
    const auto n = static_cast<Eigen::Index>(map.state_count());
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Cell c = map.cell_of(static_cast<std::size_t>(i));
        if (c == map.goal())
            continue;
        const auto probs = action_probabilities(map, c, epsilon);
        for (std::size_t a = 0; a < 4; ++a) {
            const auto r = step(map, GridState{c, 0}, all_actions[a]);
            p(i, static_cast<Eigen::Index>(map.state_index(r.next.position))) += probs[a];
        }
    }
    return p;
}

GridMap with_shortest_path_policy(int width, int height, std::vector<bool> walls, Cell start, Cell goal)
{
    const auto n = static_cast<std::size_t>(width) * height;
    auto flat = [width](Cell c) { return static_cast<std::size_t>(c.y) * width + c.x; };
    auto open = [&](Cell c) { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height && !walls[flat(c)]; };

    std::vector<int> dist(n, -1);
    std::deque<Cell> queue{goal};
    dist[flat(goal)] = 0;
    while (!queue.empty()) {
        const Cell c = queue.front();
        queue.pop_front();
        for (Action a : all_actions) {
            const Cell nb = moved(c, a);
            if (open(nb) && dist[flat(nb)] < 0) {
                dist[flat(nb)] = dist[flat(c)] + 1;
                queue.push_back(nb);
            }
        }
    }

    constexpr std::array<Action, 4> preference{Action::up, Action::right, Action::down, Action::left};
    std::vector<std::optional<Action>> policy(n);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const Cell c{x, y};
            if (!open(c) || c == goal)
                continue;
            if (dist[flat(c)] < 0)
                throw std::invalid_argument("grid map: cell (" + std::to_string(x) + ", " + std::to_string(y) +
                                            ") cannot reach the goal");
            for (Action a : preference) {
                const Cell nb = moved(c, a);
                if (open(nb) && dist[flat(nb)] == dist[flat(c)] - 1) {
                    policy[flat(c)] = a;
                    break;
                }
            }
        }
    }
    return GridMap(width, height, std::move(walls), start, goal, std::move(policy));
}

GridMap make_open_map(int width, int height, Cell start, Cell goal)
{
    return with_shortest_path_policy(width, height,
                                     std::vector<bool>(static_cast<std::size_t>(width) * height, false), start, goal);
}

GridMap make_dayan_map()
{
    // 13x13 with a border. A vertical barrier at column 8 runs from row 3 to
    // the bottom wall, so the start (bottom left) must go up and over it.
    constexpr int size = 13;
    std::vector<bool> walls(size * size, false);
    for (int i = 0; i < size; ++i) {
        walls[i] = walls[(size - 1) * size + i] = true;
        walls[i * size] = walls[i * size + size - 1] = true;
    }
    for (int y = 3; y < size - 1; ++y)
        walls[y * size + 8] = true;
    for (int x = 4; x < 8; ++x)
        walls[3 * size + x] = true;
    return with_shortest_path_policy(size, size, std::move(walls), Cell{2, 11}, Cell{10, 7});
}

}  // namespace srgvf
