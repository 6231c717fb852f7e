#include "slamot/run_record.hpp"

#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "json_codec.hpp"

namespace slamot {

using nlohmann::json;

namespace {

TrackStatus status_from_string(const std::string& s) {
  if (s == "tentative") return TrackStatus::tentative;
  if (s == "confirmed") return TrackStatus::confirmed;
  if (s == "dead") return TrackStatus::dead;
  throw std::runtime_error("unknown track status '" + s + "'");
}

json match_to_json(const MatchRecord& m) { return json{{"detection", m.detection}, {"track", m.track}, {"score", m.score}}; }

MatchRecord match_from_json(const json& j) {
  return {j.at("detection").get<int>(), j.at("track").get<int>(), j.at("score").get<double>()};
}

}  // namespace

std::string to_json(const RunRecord& r) {
  json frames = json::array();
  for (const auto& f : r.frames) {
    json m = json::array(), b = json::array();
    for (const auto& x : f.matches) m.push_back(match_to_json(x));
    for (const auto& x : f.births) b.push_back(match_to_json(x));
    frames.push_back({{"index", f.index},
                      {"keyframe", f.keyframe},
                      {"ego_pre", codec::pose_to_json(f.ego_pre)},
                      {"ego_post", codec::pose_to_json(f.ego_post)},
                      {"matches", std::move(m)},
                      {"births", std::move(b)}});
  }
  json tracks = json::array();
  for (const auto& t : r.tracks) {
    json h = json::array();
    for (const auto& e : t.history) h.push_back({{"frame", e.frame}, {"box", codec::box_to_json(e.box)}});
    tracks.push_back({{"id", t.id},
                      {"status", to_string(t.status)},
                      {"ever_confirmed", t.ever_confirmed},
                      {"reported", t.reported},
                      {"birth_frame", t.birth_frame},
                      {"history", std::move(h)}});
  }
  json solves = json::array();
  for (const auto& s : r.solves) {
    solves.push_back({{"frame", s.frame},
                      {"stage", s.stage},
                      {"costs", s.trace.costs},
                      {"iterations", s.trace.iterations},
                      {"converged", s.trace.converged},
                      {"aborted", s.trace.aborted},
                      {"diagnostic", s.trace.diagnostic}});
  }
  json out{{"format", "slamot-run/1"}, {"frames", std::move(frames)}, {"tracks", std::move(tracks)},
           {"solves", std::move(solves)}};
  return out.dump();
}

RunRecord run_record_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("run record: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "slamot-run/1") throw std::runtime_error("unsupported run record format");
    RunRecord r;
    for (const auto& f : j.at("frames")) {
      FrameRecord fr;
      fr.index = f.at("index").get<int>();
      fr.keyframe = f.at("keyframe").get<bool>();
      fr.ego_pre = codec::pose_from_json(f.at("ego_pre"));
      fr.ego_post = codec::pose_from_json(f.at("ego_post"));
      for (const auto& m : f.at("matches")) fr.matches.push_back(match_from_json(m));
      for (const auto& m : f.at("births")) fr.births.push_back(match_from_json(m));
      r.frames.push_back(std::move(fr));
    }
    for (const auto& t : j.at("tracks")) {
      TrackRecord tr;
      tr.id = t.at("id").get<int>();
      tr.status = status_from_string(t.at("status").get<std::string>());
      tr.ever_confirmed = t.at("ever_confirmed").get<bool>();
      tr.reported = t.at("reported").get<bool>();
      tr.birth_frame = t.at("birth_frame").get<int>();
      for (const auto& e : t.at("history")) {
        tr.history.push_back({e.at("frame").get<int>(), codec::box_from_json(e.at("box"))});
      }
      r.tracks.push_back(std::move(tr));
    }
    for (const auto& s : j.at("solves")) {
      SolveRecord sr;
      sr.frame = s.at("frame").get<int>();
      sr.stage = s.at("stage").get<std::string>();
      sr.trace.costs = s.at("costs").get<std::vector<double>>();
      sr.trace.iterations = s.at("iterations").get<int>();
      sr.trace.converged = s.at("converged").get<bool>();
      sr.trace.aborted = s.at("aborted").get<bool>();
      sr.trace.diagnostic = s.at("diagnostic").get<std::string>();
      r.solves.push_back(std::move(sr));
    }
    return r;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("run record: ") + e.what());
  }
}

std::string timings_json(const StageTimings& t) {
  json j{{"ingest_ms", t.ingest},       {"predict_ms", t.predict}, {"association_ms", t.association},
         {"lifecycle_ms", t.lifecycle}, {"ocow_ms", t.ocow},       {"promotion_ms", t.promotion},
         {"oefw_ms", t.oefw},           {"total_ms", t.total}};
  return j.dump(2);
}

std::string residuals_csv(const RunRecord& r) {
  std::ostringstream os;
  os.precision(17);
  os << "solve,frame,iteration,stage,total_cost\n";
  for (std::size_t s = 0; s < r.solves.size(); ++s) {
    const auto& rec = r.solves[s];
    for (std::size_t it = 0; it < rec.trace.costs.size(); ++it) {
      os << s << ',' << rec.frame << ',' << it << ',' << rec.stage << ',' << rec.trace.costs[it] << '\n';
    }
  }
  return os.str();
}

}  // namespace slamot
