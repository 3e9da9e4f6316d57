#include "fedpir/assignment.hpp"

#include "fedpir/errors.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace fedpir {

std::vector<int> TaskAssignment::incident_clients(int t) const {
    if (t < 0 || t >= T) throw std::out_of_range("objective index out of range");
    std::vector<int> out;
    for (int i = 0; i < n; ++i) {
        if (incidence[i][t]) out.push_back(i);
    }
    return out;
}

std::vector<int> TaskAssignment::incident_objectives(int i) const {
    if (i < 0 || i >= n) throw std::out_of_range("client index out of range");
    std::vector<int> out;
    for (int t = 0; t < T; ++t) {
        if (incidence[i][t]) out.push_back(t);
    }
    return out;
}

TaskAssignment build_cyclic_assignment(int n, int T, int rho) {
    if (n < 1 || T < 1) throw ConfigError("assignment needs n >= 1 and T >= 1");
    if (rho < 1 || rho > n) throw ConfigError("replication factor must satisfy 1 <= rho <= n");
    TaskAssignment a;
    a.n = n;
    a.T = T;
    a.rho = rho;
    a.incidence.assign(n, std::vector<uint8_t>(T, 0));
    for (int t = 0; t < T; ++t) {
        for (int m = 0; m < rho; ++m) {
            a.incidence[(t + m) % n][t] = 1;
        }
    }
    return a;
}

ValidationReport validate_assignment(const TaskAssignment& a) {
    ValidationReport rep;
    if (a.n < 1 || a.T < 1 || a.rho < 1) {
        rep.errors.push_back("dimensions must be positive");
        return rep;
    }
    if (static_cast<int>(a.incidence.size()) != a.n) {
        rep.errors.push_back("incidence has wrong row count");
        return rep;
    }
    for (int i = 0; i < a.n; ++i) {
        if (static_cast<int>(a.incidence[i].size()) != a.T) {
            rep.errors.push_back("incidence has wrong column count in row " + std::to_string(i + 1));
            return rep;
        }
    }
    for (int t = 0; t < a.T; ++t) {
        int weight = 0;
        for (int i = 0; i < a.n; ++i) weight += a.incidence[i][t] ? 1 : 0;
        if (weight != a.rho) {
            rep.errors.push_back("objective " + std::to_string(t + 1) + " is stored by " +
                                 std::to_string(weight) + " clients, expected " + std::to_string(a.rho));
        }
    }
    int first_row_weight = -1;
    bool uneven = false;
    for (int i = 0; i < a.n; ++i) {
        int weight = 0;
        for (int t = 0; t < a.T; ++t) weight += a.incidence[i][t] ? 1 : 0;
        if (weight == 0) {
            rep.errors.push_back("client " + std::to_string(i + 1) + " stores no objective");
        }
        if (first_row_weight < 0) first_row_weight = weight;
        else if (weight != first_row_weight) uneven = true;
    }
    if (uneven) {
        rep.warnings.push_back("client loads are uneven (row weights differ)");
    }
    return rep;
}

TaskAssignment load_assignment(std::istream& in) {
    TaskAssignment a;
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("assignment file is empty");
    {
        std::istringstream head(line);
        if (!(head >> a.n >> a.T >> a.rho)) throw ConfigError("assignment header must be 'n T rho'");
        std::string extra;
        if (head >> extra) throw ConfigError("assignment header has trailing tokens");
    }
    if (a.n < 1 || a.T < 1 || a.rho < 1 || a.rho > a.n)
        throw ConfigError("assignment header values out of range");
    a.incidence.assign(a.n, std::vector<uint8_t>(a.T, 0));
    for (int i = 0; i < a.n; ++i) {
        if (!std::getline(in, line))
            throw ConfigError("assignment file ends after " + std::to_string(i) + " of " +
                              std::to_string(a.n) + " rows");
        std::istringstream row(line);
        for (int t = 0; t < a.T; ++t) {
            int bit;
            if (!(row >> bit)) throw ConfigError("row " + std::to_string(i + 1) + " is short");
            if (bit != 0 && bit != 1)
                throw ConfigError("row " + std::to_string(i + 1) + " contains a non-binary entry");
            a.incidence[i][t] = static_cast<uint8_t>(bit);
        }
        std::string extra;
        if (row >> extra) throw ConfigError("row " + std::to_string(i + 1) + " has trailing tokens");
    }
    for (int t = 0; t < a.T; ++t) {
        int weight = 0;
        for (int i = 0; i < a.n; ++i) weight += a.incidence[i][t] ? 1 : 0;
        if (weight != a.rho)
            throw ConfigError("objective " + std::to_string(t + 1) + " has column weight " +
                              std::to_string(weight) + ", header says " + std::to_string(a.rho));
    }
    return a;
}

void save_assignment(const TaskAssignment& a, std::ostream& out) {
    out << a.n << ' ' << a.T << ' ' << a.rho << '\n';
    for (int i = 0; i < a.n; ++i) {
        for (int t = 0; t < a.T; ++t) {
            if (t) out << ' ';
            out << static_cast<int>(a.incidence[i][t]);
        }
        out << '\n';
    }
}

} // namespace fedpir
