#include "portnav/episode_log.hpp"

#include <cinttypes>
#include <cstdio>
#include <sstream>

namespace portnav {
namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, v);
  return std::string(buf);
}

}  // namespace

nlohmann::json env_config_to_json(const EnvConfig& c) {
  nlohmann::json j;
  j["worldgen"] = {{"dock_length_min", c.worldgen.ranges.dock_length_min},
                   {"dock_length_max", c.worldgen.ranges.dock_length_max},
                   {"center_offset_min", c.worldgen.ranges.center_offset_min},
                   {"center_offset_max", c.worldgen.ranges.center_offset_max},
                   {"waterway_width_min", c.worldgen.ranges.waterway_width_min},
                   {"waterway_width_max", c.worldgen.ranges.waterway_width_max},
                   {"n_traffic", c.worldgen.ranges.n_traffic},
                   {"world_length", c.worldgen.world_length},
                   {"dock_depth_min", c.worldgen.dock_depth_min},
                   {"dock_depth_max", c.worldgen.dock_depth_max},
                   {"dock_depth_width_cap", c.worldgen.dock_depth_width_cap},
                   {"dock_gap_min", c.worldgen.dock_gap_min},
                   {"dock_gap_max", c.worldgen.dock_gap_max},
                   {"dock_end_margin", c.worldgen.dock_end_margin},
                   {"buoys_min", c.worldgen.buoys_min},
                   {"buoys_max", c.worldgen.buoys_max},
                   {"buoy_radius_min", c.worldgen.buoy_radius_min},
                   {"buoy_radius_max", c.worldgen.buoy_radius_max},
                   {"buoy_start_clearance", c.worldgen.buoy_start_clearance},
                   {"buoy_wall_clearance", c.worldgen.buoy_wall_clearance},
                   {"goal_radius", c.worldgen.goal_radius},
                   {"start_clearance", c.worldgen.start_clearance},
                   {"start_end_band", c.worldgen.start_end_band},
                   {"traffic_min_leg", c.worldgen.traffic_min_leg},
                   {"traffic_os_clearance", c.worldgen.traffic_os_clearance},
                   {"max_attempts", c.worldgen.max_attempts}};
  j["hull"] = {{"mass", c.hull.mass},
               {"drag_coeff", c.hull.drag_coeff},
               {"ref_area", c.hull.ref_area},
               {"fluid_density", c.hull.fluid_density},
               {"turn_rate", c.hull.turn_rate},
               {"max_thrust", c.hull.max_thrust},
               {"rudder_limit", c.hull.rudder_limit},
               {"rudder_slew", c.hull.rudder_slew},
               {"hull_length", c.hull.hull_length},
               {"hull_beam", c.hull.hull_beam}};
  j["pid_heading"] = {{"kp", c.heading_gains.kp},
                      {"ki", c.heading_gains.ki},
                      {"kd", c.heading_gains.kd},
                      {"integral_limit", c.heading_gains.integral_limit}};
  j["pid_speed"] = {{"kp", c.speed_gains.kp},
                    {"ki", c.speed_gains.ki},
                    {"kd", c.speed_gains.kd},
                    {"integral_limit", c.speed_gains.integral_limit}};
  j["scan"] = {{"num_rays", c.scan.num_rays},
               {"fov_deg", c.scan.fov_deg},
               {"max_range", c.scan.max_range},
               {"noise_sigma", c.scan.noise_sigma}};
  j["rrt"] = {{"steer_step", c.rrt.steer_step},
              {"goal_bias", c.rrt.goal_bias},
              {"safety_margin", c.rrt.safety_margin},
              {"gamma", c.rrt.gamma}};
  j["env"] = {{"rrt_budget", c.rrt_budget},
              {"traffic_rrt_budget", c.traffic_rrt_budget},
              {"dt", c.dt},
              {"timeout_steps", c.timeout_steps},
              {"world_epoch", c.world_epoch},
              {"reset_task_retries", c.reset_task_retries},
              {"hull_collision", c.hull_collision},
              {"traffic_capture_radius", c.traffic_capture_radius},
              {"traffic_hull_length", c.traffic_hull_length},
              {"traffic_hull_beam", c.traffic_hull_beam},
              {"lookahead", c.lookahead},
              {"path_points", c.path_points},
              {"path_point_spacing", c.path_point_spacing},
              {"dist_scale", c.dist_scale},
              {"angle_scale", c.angle_scale},
              {"speed_scale", c.speed_scale},
              {"frame_stack", c.frame_stack}};
  return j;
}

EnvConfig env_config_from_json(const nlohmann::json& j) {
  EnvConfig c;
  const auto& w = j.at("worldgen");
  c.worldgen.ranges.dock_length_min = w.at("dock_length_min").get<double>();
  c.worldgen.ranges.dock_length_max = w.at("dock_length_max").get<double>();
  c.worldgen.ranges.center_offset_min = w.at("center_offset_min").get<double>();
  c.worldgen.ranges.center_offset_max = w.at("center_offset_max").get<double>();
  c.worldgen.ranges.waterway_width_min = w.at("waterway_width_min").get<double>();
  c.worldgen.ranges.waterway_width_max = w.at("waterway_width_max").get<double>();
  c.worldgen.ranges.n_traffic = w.at("n_traffic").get<int>();
  c.worldgen.world_length = w.at("world_length").get<double>();
  c.worldgen.dock_depth_min = w.at("dock_depth_min").get<double>();
  c.worldgen.dock_depth_max = w.at("dock_depth_max").get<double>();
  c.worldgen.dock_depth_width_cap = w.at("dock_depth_width_cap").get<double>();
  c.worldgen.dock_gap_min = w.at("dock_gap_min").get<double>();
  c.worldgen.dock_gap_max = w.at("dock_gap_max").get<double>();
  c.worldgen.dock_end_margin = w.at("dock_end_margin").get<double>();
  c.worldgen.buoys_min = w.at("buoys_min").get<int>();
  c.worldgen.buoys_max = w.at("buoys_max").get<int>();
  c.worldgen.buoy_radius_min = w.at("buoy_radius_min").get<double>();
  c.worldgen.buoy_radius_max = w.at("buoy_radius_max").get<double>();
  c.worldgen.buoy_start_clearance = w.at("buoy_start_clearance").get<double>();
  c.worldgen.buoy_wall_clearance = w.at("buoy_wall_clearance").get<double>();
  c.worldgen.goal_radius = w.at("goal_radius").get<double>();
  c.worldgen.start_clearance = w.at("start_clearance").get<double>();
  c.worldgen.start_end_band = w.at("start_end_band").get<double>();
  c.worldgen.traffic_min_leg = w.at("traffic_min_leg").get<double>();
  c.worldgen.traffic_os_clearance = w.at("traffic_os_clearance").get<double>();
  c.worldgen.max_attempts = w.at("max_attempts").get<int>();
  const auto& h = j.at("hull");
  c.hull.mass = h.at("mass").get<double>();
  c.hull.drag_coeff = h.at("drag_coeff").get<double>();
  c.hull.ref_area = h.at("ref_area").get<double>();
  c.hull.fluid_density = h.at("fluid_density").get<double>();
  c.hull.turn_rate = h.at("turn_rate").get<double>();
  c.hull.max_thrust = h.at("max_thrust").get<double>();
  c.hull.rudder_limit = h.at("rudder_limit").get<double>();
  c.hull.rudder_slew = h.at("rudder_slew").get<double>();
  c.hull.hull_length = h.at("hull_length").get<double>();
  c.hull.hull_beam = h.at("hull_beam").get<double>();
  const auto& ph = j.at("pid_heading");
  c.heading_gains = PidGains{ph.at("kp").get<double>(), ph.at("ki").get<double>(),
                             ph.at("kd").get<double>(), ph.at("integral_limit").get<double>()};
  const auto& ps = j.at("pid_speed");
  c.speed_gains = PidGains{ps.at("kp").get<double>(), ps.at("ki").get<double>(),
                           ps.at("kd").get<double>(), ps.at("integral_limit").get<double>()};
  const auto& sc = j.at("scan");
  c.scan.num_rays = sc.at("num_rays").get<int>();
  c.scan.fov_deg = sc.at("fov_deg").get<double>();
  c.scan.max_range = sc.at("max_range").get<double>();
  c.scan.noise_sigma = sc.at("noise_sigma").get<double>();
  const auto& r = j.at("rrt");
  c.rrt.steer_step = r.at("steer_step").get<double>();
  c.rrt.goal_bias = r.at("goal_bias").get<double>();
  c.rrt.safety_margin = r.at("safety_margin").get<double>();
  c.rrt.gamma = r.at("gamma").get<double>();
  const auto& e = j.at("env");
  c.rrt_budget = e.at("rrt_budget").get<int>();
  c.traffic_rrt_budget = e.at("traffic_rrt_budget").get<int>();
  c.dt = e.at("dt").get<double>();
  c.timeout_steps = e.at("timeout_steps").get<int>();
  c.world_epoch = e.at("world_epoch").get<int>();
  c.reset_task_retries = e.at("reset_task_retries").get<int>();
  c.hull_collision = e.at("hull_collision").get<bool>();
  c.traffic_capture_radius = e.at("traffic_capture_radius").get<double>();
  c.traffic_hull_length = e.at("traffic_hull_length").get<double>();
  c.traffic_hull_beam = e.at("traffic_hull_beam").get<double>();
  c.lookahead = e.at("lookahead").get<double>();
  c.path_points = e.at("path_points").get<int>();
  c.path_point_spacing = e.at("path_point_spacing").get<double>();
  c.dist_scale = e.at("dist_scale").get<double>();
  c.angle_scale = e.at("angle_scale").get<double>();
  c.speed_scale = e.at("speed_scale").get<double>();
  c.frame_stack = e.at("frame_stack").get<int>();
  return c;
}

nlohmann::json episode_header_record(int episode, const Environment& env) {
  return nlohmann::json{{"type", "ep"},
                        {"ep", episode},
                        {"geometry_seed", env.geometry_seed()},
                        {"task_seed", env.task_seed()},
                        {"world_hash", hex64(env.world().hash())}};
}

nlohmann::json step_record(int episode, int t, Action a, const StepResult& result,
                           const Environment& env) {
  const VesselState& s = env.os_state();
  return nlohmann::json{{"type", "step"}, {"ep", episode},
                        {"t", t},         {"ah", a.heading_idx},
                        {"as", a.speed_idx}, {"r", result.reward},
                        {"k", terminal_kind_name(result.kind)},
                        {"x", s.x},       {"y", s.y},
                        {"th", s.heading}, {"sp", s.speed},
                        {"ex", result.los.e_x}, {"ey", result.los.e_y},
                        {"epsi", result.los.e_psi},
                        {"dg", hex64(env.state_digest())}};
}

nlohmann::json episode_end_record(int episode, TerminalKind kind, int length, double ret) {
  return nlohmann::json{{"type", "end"},
                        {"ep", episode},
                        {"kind", terminal_kind_name(kind)},
                        {"len", length},
                        {"ret", ret}};
}

EpisodeLogWriter::EpisodeLogWriter(const std::string& path, const EnvConfig& env_cfg,
                                   const nlohmann::json& config_echo)
    : out_(path, std::ios::trunc) {
  if (!out_) {
    throw std::runtime_error("cannot open episode log for writing: " + path);
  }
  nlohmann::json header{{"type", "run"},
                        {"version", 1},
                        {"env_config", env_config_to_json(env_cfg)},
                        {"config", config_echo}};
  out_ << header.dump() << "\n";
}

void EpisodeLogWriter::begin_episode(int episode, const Environment& env) {
  out_ << episode_header_record(episode, env).dump() << "\n";
}

void EpisodeLogWriter::log_step(int episode, int t, Action a, const StepResult& result,
                                const Environment& env) {
  out_ << step_record(episode, t, a, result, env).dump() << "\n";
}

void EpisodeLogWriter::end_episode(int episode, TerminalKind kind, int length, double ret) {
  out_ << episode_end_record(episode, kind, length, ret).dump() << "\n";
  out_.flush();
}

void EpisodeLogWriter::flush() { out_.flush(); }

ReplayAuditResult replay_audit(const std::string& log_path) {
  std::ifstream in(log_path);
  if (!in) {
    throw std::runtime_error("cannot open episode log: " + log_path);
  }
  ReplayAuditResult res;
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("empty episode log: " + log_path);
  }
  const nlohmann::json header = nlohmann::json::parse(line);
  if (header.at("type") != "run") {
    throw std::runtime_error("episode log does not start with a run header");
  }
  const EnvConfig cfg = env_config_from_json(header.at("env_config"));
  Environment env(cfg);

  int cur_episode = -1;
  int expect_t = 0;
  bool in_episode = false;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    const nlohmann::json rec = nlohmann::json::parse(line);
    const std::string type = rec.at("type").get<std::string>();
    if (type == "ep") {
      cur_episode = rec.at("ep").get<int>();
      env.reset_from_seeds(rec.at("geometry_seed").get<std::uint64_t>(),
                           rec.at("task_seed").get<std::uint64_t>());
      const std::string regenerated = episode_header_record(cur_episode, env).dump();
      if (regenerated != line) {
        ++res.mismatches;
        if (res.first_mismatch.empty()) {
          res.first_mismatch = "episode " + std::to_string(cur_episode) + " header";
        }
      }
      expect_t = 0;
      in_episode = true;
    } else if (type == "step") {
      if (!in_episode) {
        throw std::runtime_error("step record outside an episode");
      }
      const Action a{rec.at("ah").get<int>(), rec.at("as").get<int>()};
      const StepResult sr = env.step(a);
      const std::string regenerated =
          step_record(cur_episode, expect_t, a, sr, env).dump();
      if (regenerated != line) {
        ++res.mismatches;
        if (res.first_mismatch.empty()) {
          res.first_mismatch =
              "episode " + std::to_string(cur_episode) + " step " + std::to_string(expect_t);
        }
      }
      ++expect_t;
    } else if (type == "end") {
      ++res.episodes_checked;
      in_episode = false;
    }
  }
  return res;
}

}  // namespace portnav
