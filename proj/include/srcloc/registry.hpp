#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "srcloc/graph.hpp"

namespace srcloc {

// Published statistics of one benchmark dataset. Raw files are not shipped;
// the registry lets user-supplied files be checked against these numbers.
struct DatasetDescriptor {
    std::string name;
    std::size_t expected_nodes = 0;
    std::size_t expected_edges = 0;
    double expected_avg_degree = 0.0;  // as published, 3 decimals
    bool has_pairs = false;            // ships its own seed-diffusion pairs
};

std::span<const DatasetDescriptor> registry();

// Case-insensitive; spaces, '-' and '_' are ignored ("power_grid" finds
// "Power Grid"). Throws Error listing the known names when absent.
const DatasetDescriptor& find_dataset(std::string_view name);

struct ValidationEntry {
    std::string field;  // "nodes", "edges" or "avg_degree"
    double expected = 0.0;
    double actual = 0.0;
    bool match = false;
};

struct ValidationReport {
    std::string dataset;
    std::vector<ValidationEntry> entries;

    bool all_match() const;
};

// Mismatches are reported, not thrown: preprocessing variants of the same
// dataset routinely differ by a few nodes or edges.
ValidationReport validate_against_registry(const Graph& g, std::string_view name);

}  // namespace srcloc
