#ifndef DNR_TESTS_HELPERS_HPP
#define DNR_TESTS_HELPERS_HPP

#include <string>

#include "dnr/case_io.hpp"
#include "dnr/model.hpp"

namespace helpers {

inline std::string fixture_path(const std::string& name) {
    return std::string(DNR_FIXTURE_DIR) + "/" + name;
}

inline dnr::NetworkCase simple_case() {
    return dnr::load_case_file(fixture_path("simple_case.json"));
}

inline dnr::NetworkCase spanish_case() {
    return dnr::load_case_file(fixture_path("spanish_like.json"));
}

inline dnr::ProfileSet flat_profiles() {
    return dnr::ProfileSet::load_file(fixture_path("flat.csv"));
}

inline dnr::ProfileSet spanish_profiles() {
    return dnr::ProfileSet::load_file(fixture_path("spanish_day.csv"));
}

} // namespace helpers

#endif
