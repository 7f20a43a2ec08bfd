#include "emfg/lp.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

namespace emfg {

void LPProblem::validate() const {
    if (n_rows < 1 || n_vars < 1)
        throw ValidationError("LPProblem: empty problem");
    if (static_cast<int>(col_ptr.size()) != n_vars + 1)
        throw ValidationError("LPProblem: col_ptr size mismatch");
    if (col_ptr.front() != 0 || col_ptr.back() != static_cast<int>(row_idx.size())
        || row_idx.size() != value.size())
        throw ValidationError("LPProblem: inconsistent sparse storage");
    if (static_cast<int>(rhs.size()) != n_rows || static_cast<int>(objective.size()) != n_vars)
        throw ValidationError("LPProblem: rhs/objective size mismatch");
    for (int c = 0; c < n_vars; ++c) {
        for (int k = col_ptr[c]; k < col_ptr[c + 1]; ++k) {
            if (row_idx[k] < 0 || row_idx[k] >= n_rows)
                throw ValidationError("LPProblem: row index out of range");
            if (k > col_ptr[c] && row_idx[k] <= row_idx[k - 1])
                throw ValidationError("LPProblem: column rows not strictly increasing");
        }
    }
}

int LPProblem::coupling_bandwidth() const {
    int bw = 0;
    for (int c = 0; c < n_vars; ++c) {
        const int lo = col_ptr[c];
        const int hi = col_ptr[c + 1];
        if (hi > lo) bw = std::max(bw, row_idx[hi - 1] - row_idx[lo]);
    }
    return bw;
}

void LPProblem::write_mps(const std::string& path, const std::string& name) const {
    std::ofstream out(path);
    if (!out) throw IngestionError("write_mps: cannot open " + path);
    char buf[64];
    out << "NAME " << name << "\n";
    out << "OBJSENSE\n    MAX\n";
    out << "ROWS\n N COST\n";
    for (int r = 0; r < n_rows; ++r) out << " L R" << r << "\n";
    out << "COLUMNS\n";
    for (int c = 0; c < n_vars; ++c) {
        if (objective[c] != 0.0) {
            std::snprintf(buf, sizeof buf, "%.17g", objective[c]);
            out << "    X" << c << " COST " << buf << "\n";
        }
        for (int k = col_ptr[c]; k < col_ptr[c + 1]; ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", value[k]);
            out << "    X" << c << " R" << row_idx[k] << " " << buf << "\n";
        }
    }
    out << "RHS\n";
    for (int r = 0; r < n_rows; ++r) {
        if (rhs[r] != 0.0) {
            std::snprintf(buf, sizeof buf, "%.17g", rhs[r]);
            out << "    RHS R" << r << " " << buf << "\n";
        }
    }
    out << "BOUNDS\nENDATA\n";
    if (!out) throw IngestionError("write_mps: write failed for " + path);
}

}  // namespace emfg
