#ifndef DNR_CASE_IO_HPP
#define DNR_CASE_IO_HPP

#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "dnr/model.hpp"

namespace dnr {

// JSON case document. Unknown keys are rejected at every level; ids are
// strings. The loaded case is fully validated.
NetworkCase load_case(std::istream& in);
NetworkCase load_case_file(const std::string& path);
NetworkCase load_case_string(const std::string& text);

std::string save_case(const NetworkCase& c);
void save_case_file(const NetworkCase& c, const std::string& path);

// Multi-period profile set parsed from CSV:
//   timestep,<key_1>,<key_2>,...
// one row per timestep, values in kW (negative = injection).
class ProfileSet {
public:
    int timesteps() const { return static_cast<int>(rows_.size()); }
    bool has_key(const std::string& key) const { return columns_.count(key) > 0; }
    double value_kw(const std::string& key, int t) const;
    std::vector<std::string> keys() const;

    static ProfileSet parse(std::istream& in);
    static ProfileSet load_file(const std::string& path);
    static ProfileSet load_string(const std::string& text);

    // Uniform profiles built in code, handy for tests.
    static ProfileSet constant(const std::vector<std::string>& keys, double kw, int timesteps);

private:
    std::unordered_map<std::string, int> columns_;
    std::vector<std::vector<double>> rows_;
};

} // namespace dnr

#endif
