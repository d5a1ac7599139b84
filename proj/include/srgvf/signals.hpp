#pragma once

#include "srgvf/gridworld.hpp"

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace srgvf {

enum class Primitive : std::uint8_t { fixed_value, square_wave, sin_wave, random_binary, random_float, unit };

const char* primitive_name(Primitive p);

/// One axis of a composed signal: sig(coord + offset) + bias.
struct AxisSignal {
    Primitive primitive = Primitive::unit;
    int period = 0;       // square and sin waves, in [2, 40)
    bool invert = false;  // square wave
    double value = 0.0;   // fixed value, in [-2, 2)
    std::vector<double> table;  // random binary / float, indexed by coord + offset
    int offset = 0;       // [0, 10); zero for unit
    double bias = 0.0;    // [-2, 2); zero for unit

    /// Noise-free sig(coord + offset) + bias.
    double operator()(int coord) const;

    friend bool operator==(const AxisSignal&, const AxisSignal&) = default;
};

enum class SignalKind : std::uint8_t { composed, shortest_path, unit };

struct SignalSpec {
    std::size_t id = 0;
    SignalKind kind = SignalKind::unit;
    AxisSignal x_axis;
    AxisSignal y_axis;
    double transition_cost = 0.0;  // shortest path, [-10, -1)
    double goal_reward = 0.0;      // shortest path, [1, 10)
    double noise_sigma = 0.3;
    std::uint64_t seed = 0;

    friend bool operator==(const SignalSpec&, const SignalSpec&) = default;
};

struct SignalSampling {
    int width = 1;   // axis lengths of the target world
    int height = 1;
    double shortest_path_probability = 1.0 / 7.0;
    double noise_sigma = 0.3;
};

/// Maximum offset plus one; random tables extend this far past the axis.
inline constexpr int offset_range = 10;

SignalSpec sample_spec(std::mt19937_64& rng, const SignalSampling& sampling, std::size_t id = 0);

/// Cumulant of the transition out of cell (x, y); `reached_goal` tells
/// whether that transition entered the goal. Adds N(0, sigma^2) noise.
double evaluate(const SignalSpec& spec, int x, int y, bool reached_goal, std::mt19937_64& rng);
double evaluate_mean(const SignalSpec& spec, int x, int y, bool reached_goal);

/// Expected cumulant per state index under the epsilon-greedy policy, noise
/// stripped. The goal entry is zero: no transition leaves it.
std::vector<double> mean_field(const SignalSpec& spec, const GridMap& map, double epsilon);

/// One record per line; doubles round-trip exactly.
void write_specs(std::ostream& os, const std::vector<SignalSpec>& specs);
std::vector<SignalSpec> read_specs(std::istream& is);

}  // namespace srgvf
