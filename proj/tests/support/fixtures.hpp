#pragma once

#include "kad/controller.hpp"
#include "kad/storage.hpp"

#include <string>

namespace kad::fixtures {

inline std::string data_dir() { return KAD_DATA_DIR; }

inline EngineConfig hotel() { return load_config(bundle_paths(data_dir() + "/hotel")); }
inline EngineConfig restaurant() { return load_config(bundle_paths(data_dir() + "/restaurant")); }

inline const char *kStayed = "I stayed in the Holiday Inn at 150 Pine Street last night.";
inline const char *kFriends = "I stayed in Holiday Inn at 150 Pine Street last night with a few friends";

inline CandidateTriple candidate(std::string s, std::string r, std::string o) {
    return CandidateTriple{EntityRef{std::move(s), std::nullopt}, std::move(r), EntityRef{std::move(o), std::nullopt},
                           Origin::fact, 0, "test"};
}

} // namespace kad::fixtures
