#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "tollsplit/model.hpp"

namespace tollsplit {

// Scenario files are flat "key = value" lines; '#' starts a comment.
//
//   horizon = 5000
//   seed = 7
//   total_rate = 2
//   servers[0].rate = 1          servers[j].{rate,toll}
//   servers[0].toll = 0.5
//   classes[0].rate = 1.5        classes[i].{rate,reward,cost,size,interarrival,id}
//   classes[0].reward = 4
//   classes[0].cost = 1
//   classes[0].size = fixed:1    fixed:w | exp:mean | twopoint:a,b,p | empirical:w1,w2,...
//   classes[0].interarrival = exp    exp[:rate] | fixed[:gap] | uniform:lo,hi | empirical:g1,g2,...
//
// total_rate defaults to the sum of server rates; toll defaults to 0; size to fixed:1;
// interarrival to Poisson at the class rate; id to the bracket index.
Scenario parse_scenario(std::string_view text, const std::string& source = "<scenario>");
Scenario load_scenario(const std::filesystem::path& path);

// Inverse of parse_scenario; numbers are written with 17 significant digits.
std::string format_scenario(const Scenario& scenario);

SizeModel parse_size_model(std::string_view text);
InterarrivalDist parse_interarrival(std::string_view text, double class_rate);

}  // namespace tollsplit
