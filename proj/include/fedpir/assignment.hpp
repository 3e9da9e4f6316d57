#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace fedpir {

// Binary incidence between clients (rows, 0-based) and objectives (columns,
// 0-based). Every column is required to contain exactly rho ones; rows may be
// uneven. File headers and printed ids are 1-based to match the usual
// description of the scheme, internals are 0-based throughout.
struct TaskAssignment {
    int n = 0;
    int T = 0;
    int rho = 0;
    std::vector<std::vector<uint8_t>> incidence; // incidence[i][t]

    // Clients storing objective t, ascending.
    std::vector<int> incident_clients(int t) const;
    // Objectives stored by client i, ascending.
    std::vector<int> incident_objectives(int i) const;
};

// Replication pattern used throughout: objective t is stored by the rho
// cyclically consecutive clients starting at t mod n.
TaskAssignment build_cyclic_assignment(int n, int T, int rho);

struct ValidationReport {
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
    bool ok() const { return errors.empty(); }
};

// Structural checks: column weights equal rho, no client left without an
// objective. Uneven row weights are reported as a warning only.
ValidationReport validate_assignment(const TaskAssignment& a);

// Text format: first line "n T rho", then n lines of T space-separated 0/1.
TaskAssignment load_assignment(std::istream& in);
void save_assignment(const TaskAssignment& a, std::ostream& out);

} // namespace fedpir
