#pragma once

// CSV persistence for yield records and checkpoint streams.
// Floats carry 10 significant digits; write -> read -> write is
// byte-identical.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "specbox/errors.hpp"
#include "specbox/observables.hpp"

namespace specbox {

inline std::string format_g10(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline const char* yield_csv_header() {
    return "omega_eV,lambda_nm,P_gs,Y_exc,Y_ion,orientation,Nc,intensity_Wcm2,preset_id,status";
}

// factor_two doubles the reported excitation/ionisation yields (comparison
// convention for one-electron systems standing in for two equivalent
// electrons); the ground-state population is left untouched.
inline std::string yield_csv_row(const YieldRecord& r) {
    const double mult = r.factor_two ? 2.0 : 1.0;
    std::ostringstream os;
    os << format_g10(r.omega_ev) << ',' << format_g10(r.lambda_nm) << ',' << format_g10(r.p_gs)
       << ',' << format_g10(mult * r.y_exc) << ',' << format_g10(mult * r.y_ion) << ','
       << r.orientation << ',' << r.cycles << ',' << format_g10(r.intensity_wcm2) << ','
       << r.preset_id << ',' << r.status;
    return os.str();
}

inline void write_yield_csv(const std::string& path, const std::vector<YieldRecord>& recs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << yield_csv_header() << '\n';
    for (const auto& r : recs) out << yield_csv_row(r) << '\n';
    if (!out) throw IoError("short write to '" + path + "'");
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> f;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            f.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    f.push_back(cur);
    return f;
}

inline std::vector<YieldRecord> read_yield_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line != yield_csv_header())
        throw IoError("'" + path + "' is not a yield CSV");
    std::vector<YieldRecord> recs;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        if (f.size() != 10) throw IoError("malformed row in '" + path + "'");
        YieldRecord r;
        r.omega_ev = std::stod(f[0]);
        r.lambda_nm = std::stod(f[1]);
        r.p_gs = std::stod(f[2]);
        r.y_exc = std::stod(f[3]);
        r.y_ion = std::stod(f[4]);
        r.orientation = f[5];
        r.cycles = std::stoi(f[6]);
        r.intensity_wcm2 = std::stod(f[7]);
        r.preset_id = f[8];
        r.status = f[9];
        recs.push_back(std::move(r));
    }
    return recs;
}

inline void write_checkpoint_csv(const std::string& path, const std::vector<Checkpoint>& cps) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << "t,P_gs,norm\n";
    for (const auto& c : cps)
        out << format_g10(c.t) << ',' << format_g10(c.p_gs) << ',' << format_g10(c.norm) << '\n';
}

} // namespace specbox
