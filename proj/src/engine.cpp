#include "uavsec/engine.hpp"

#include "uavsec/detect.hpp"
#include "uavsec/errors.hpp"
#include "uavsec/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

namespace uavsec::engine {

using nlohmann::json;
using scene::NodeSpec;
using scene::Position3D;

namespace {

std::string link_name(const std::string& tx, const std::string& rx) { return tx + ">" + rx; }

// Shortest round-trip decimal form; keeps CSV output byte-stable.
std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string join_or_dash(const std::vector<std::string>& items) {
    if (items.empty()) return "-";
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += "|";
        out += items[i];
    }
    return out;
}

struct LinkDraws {
    std::string tx_id;
    std::string rx_id;
    channel::LinkGainSampler sampler;
    std::vector<double> gains; // one per fading sample
    double mean_gain = 0.0;
};

// Mean rate / SINR over the fading samples for one transmitter at one
// receiver, with that receiver's per-sample interference.
struct LinkEval {
    double mean_rate_bps = 0.0;
    double mean_sinr = 0.0;
    double mean_gain = 0.0;
};

class Simulation {
public:
    Simulation(const ScenarioConfig& cfg, const RunOptions& opts) : cfg_(cfg), opts_(opts) {
        for (const auto& n : cfg_.nodes) {
            switch (n.role) {
            case scene::Role::base_station: bs_.push_back(&n); break;
            case scene::Role::user: users_.push_back(&n); break;
            case scene::Role::uav_relay: if (relay_ == nullptr) relay_ = &n; break;
            case scene::Role::uav_hotzone: if (hotzone_ == nullptr) hotzone_ = &n; break;
            case scene::Role::uav_safezone: safezone_uavs_.push_back(&n); break;
            case scene::Role::eavesdropper: eves_.push_back(&n); break;
            case scene::Role::jammer: jammers_.push_back(&n); break;
            case scene::Role::uav_sensor: break;
            }
        }
        auto by_id = [](const NodeSpec* a, const NodeSpec* b) { return a->id < b->id; };
        std::sort(bs_.begin(), bs_.end(), by_id);
        std::sort(users_.begin(), users_.end(), by_id);
        std::sort(eves_.begin(), eves_.end(), by_id);
        std::sort(jammers_.begin(), jammers_.end(), by_id);
        std::sort(safezone_uavs_.begin(), safezone_uavs_.end(), by_id);
        if (cfg_.policies.relay.enabled && relay_ == nullptr) {
            throw config_error("relay policy enabled but no uav_relay node present");
        }
        if (cfg_.policies.hotzone.enabled && hotzone_ == nullptr) {
            throw config_error("hotzone policy enabled but no uav_hotzone node present");
        }
        if (cfg_.policies.safezone.enabled && safezone_uavs_.empty()) {
            throw config_error("safezone policy enabled but no uav_safezone node present");
        }
        if (cfg_.policies.uplink.enabled) {
            for (const auto& n : cfg_.nodes) {
                if (n.role == scene::Role::user && n.tx_power_dbm.has_value()) {
                    uplink_candidates_.push_back(&n);
                }
            }
            std::sort(uplink_candidates_.begin(), uplink_candidates_.end(), by_id);
        }
        samples_ = opts_.fading_disabled ? 1 : cfg_.channel.fading_samples_per_step;
    }

    RunResult execute() {
        RunResult result;
        result.config = cfg_;

        const std::size_t n_steps =
            static_cast<std::size_t>(std::floor(cfg_.duration_s / cfg_.timestep_s + 1e-9)) + 1;
        result.records.reserve(n_steps);

        for (std::size_t step = 0; step < n_steps; ++step) {
            result.records.push_back(run_step(step));
        }
        result.summary = summarize(result);
        return result;
    }

private:
    Position3D pos(const NodeSpec* n, double t) const {
        return scene::position_at(*n, cfg_.nodes, t);
    }

    double tx_watts(const NodeSpec* n) const {
        return linkmetrics::dbm_to_watts(n->tx_power_dbm.value());
    }

    channel::LinkClass classify(const NodeSpec* a, const NodeSpec* b) const {
        const bool a_air = scene::role_is_aerial(a->role);
        const bool b_air = scene::role_is_aerial(b->role);
        if (a_air && b_air) return channel::LinkClass::air_air;
        if (a_air || b_air) return channel::LinkClass::air_ground;
        return channel::LinkClass::ground_ground;
    }

    // Draw all fading samples for the listed links; keyed substreams make the
    // result independent of execution order, so chunking by thread is safe.
    void draw_links(std::vector<LinkDraws>& links, std::size_t step) {
        auto draw_one = [&](LinkDraws& link) {
            link.gains.resize(samples_);
            if (opts_.fading_disabled) {
                link.gains[0] = link.sampler.deterministic_gain();
                link.mean_gain = link.gains[0];
                return;
            }
            auto stream = rng::link_step_stream(
                cfg_.master_seed, rng::link_key(link.tx_id, link.rx_id), step);
            double sum = 0.0;
            for (int k = 0; k < samples_; ++k) {
                const double g = link.sampler.sample(stream);
                link.gains[k] = g;
                sum += g;
            }
            link.mean_gain = sum / samples_;
        };
        const int threads = std::max(1, opts_.threads);
        if (threads == 1 || links.size() <= 1) {
            for (auto& l : links) draw_one(l);
            return;
        }
        std::vector<std::thread> pool;
        std::size_t chunk = (links.size() + threads - 1) / threads;
        for (int tix = 0; tix < threads; ++tix) {
            const std::size_t lo = tix * chunk;
            const std::size_t hi = std::min(links.size(), lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back([&links, lo, hi, &draw_one]() {
                for (std::size_t i = lo; i < hi; ++i) draw_one(links[i]);
            });
        }
        for (auto& th : pool) th.join();
    }

    LinkEval evaluate_link(const LinkDraws& link, double tx_power_w,
                           std::span<const double> interference_w, double bandwidth_hz) const {
        LinkEval ev;
        double rate_sum = 0.0;
        double sinr_sum = 0.0;
        for (int k = 0; k < samples_; ++k) {
            const double interf = interference_w.empty() ? 0.0 : interference_w[k];
            const double s = tx_power_w * link.gains[k] / (cfg_.noise.noise_power_w + interf);
            sinr_sum += s;
            rate_sum += std::log2(1.0 + s);
        }
        ev.mean_sinr = sinr_sum / samples_;
        ev.mean_rate_bps = bandwidth_hz * rate_sum / samples_;
        ev.mean_gain = link.mean_gain;
        return ev;
    }

    StepRecord run_step(std::size_t step) {
        const double t = static_cast<double>(step) * cfg_.timestep_s;
        StepRecord rec;
        rec.t = t;
        for (const auto& n : cfg_.nodes) {
            rec.positions[n.id] = scene::position_at(n, cfg_.nodes, t);
        }
        const NodeSpec* user = users_.front();
        const NodeSpec* primary = bs_.front();
        const Position3D user_pos = rec.positions.at(user->id);

        // ---- plan the directed links this step needs -----------------------
        std::vector<LinkDraws> links;
        auto add_link = [&](const NodeSpec* tx, const NodeSpec* rx) {
            const auto tx_pos = rec.positions.at(tx->id);
            const auto rx_pos = rec.positions.at(rx->id);
            links.push_back(LinkDraws{
                tx->id, rx->id,
                channel::LinkGainSampler::make(tx_pos, rx_pos, classify(tx, rx), cfg_.channel),
                {}, 0.0});
        };

        for (const auto* b : bs_) {
            add_link(b, user);
            for (const auto* e : eves_) add_link(b, e);
        }
        for (std::size_t ui = 1; ui < users_.size(); ++ui) add_link(primary, users_[ui]);
        const bool relay_on = cfg_.policies.relay.enabled;
        if (relay_on) {
            add_link(primary, relay_);
            add_link(relay_, user);
            for (const auto* e : eves_) add_link(relay_, e);
        }
        const bool hotzone_on = cfg_.policies.hotzone.enabled;
        if (hotzone_on) add_link(hotzone_, user);
        for (const auto* j : jammers_) {
            for (const auto* u : users_) add_link(j, u);
            if (relay_on) add_link(j, relay_);
            for (const auto* e : eves_) add_link(j, e);
        }

        // Safe zone: decide which eavesdroppers the AN sectors illuminate
        // before rates are computed (geometry only, deterministic).
        std::vector<std::pair<const NodeSpec*, const NodeSpec*>> an_hits; // (uav, eve)
        if (cfg_.policies.safezone.enabled) {
            for (const auto* az : safezone_uavs_) {
                const auto az_pos = rec.positions.at(az->id);
                const double user_az = scene::azimuth_deg(az_pos, user_pos);
                std::vector<double> centers = cfg_.policies.safezone.config.sector_centers_deg;
                if (cfg_.policies.safezone.auto_sectors) {
                    centers.clear();
                    for (const auto* e : eves_) {
                        centers.push_back(scene::azimuth_deg(az_pos, rec.positions.at(e->id)));
                    }
                }
                for (const auto* e : eves_) {
                    const double eve_az = scene::azimuth_deg(az_pos, rec.positions.at(e->id));
                    if (policies::an_sector_covers(eve_az, user_az, centers,
                                                   cfg_.policies.safezone.config)) {
                        an_hits.emplace_back(az, e);
                        add_link(az, e);
                    }
                }
            }
        }

        draw_links(links, step);
        auto find_link = [&](const std::string& tx, const std::string& rx) -> const LinkDraws& {
            for (const auto& l : links) {
                if (l.tx_id == tx && l.rx_id == rx) return l;
            }
            throw std::logic_error("missing link draws for " + link_name(tx, rx));
        };

        // ---- per-sample interference at every receiver ----------------------
        auto interference_at = [&](const std::string& rx_id) {
            std::vector<double> interf(samples_, 0.0);
            for (const auto* j : jammers_) {
                const auto& jl = find_link(j->id, rx_id);
                const double pj = tx_watts(j);
                for (int k = 0; k < samples_; ++k) interf[k] += pj * jl.gains[k];
            }
            return interf;
        };
        const std::vector<double> interf_user = interference_at(user->id);
        std::map<std::string, std::vector<double>> interf_eve;
        for (const auto* e : eves_) interf_eve[e->id] = interference_at(e->id);
        for (const auto& [az, e] : an_hits) {
            const auto& al = find_link(az->id, e->id);
            const double pa = linkmetrics::dbm_to_watts(cfg_.policies.safezone.config.an_power_dbm);
            auto& interf = interf_eve.at(e->id);
            for (int k = 0; k < samples_; ++k) interf[k] += pa * al.gains[k];
        }

        // Victim base stations run at reduced bandwidth while resource
        // dedication is active.
        auto bs_bandwidth = [&](const std::string& bs_id) {
            if (dedicated_active_ && victim_bs_.contains(bs_id)) {
                return cfg_.bandwidth_hz * dedicated_bw_factor_;
            }
            return cfg_.bandwidth_hz;
        };

        auto record_link = [&](const LinkDraws& l, const LinkEval& ev) {
            if (!std::isfinite(ev.mean_rate_bps) || !std::isfinite(ev.mean_sinr)) {
                throw numeric_error("non-finite metric on link " + link_name(l.tx_id, l.rx_id) +
                                    " at t=" + format_double(rec.t));
            }
            rec.links[link_name(l.tx_id, l.rx_id)] =
                LinkStat{ev.mean_gain, linkmetrics::linear_to_db(ev.mean_sinr), ev.mean_rate_bps};
        };

        // ---- per-BS direct rates and secrecy --------------------------------
        std::map<std::string, double> bs_user_rate;
        std::map<std::string, double> bs_user_sinr;
        std::map<std::string, linkmetrics::SecrecyResult> per_bs;
        for (const auto* b : bs_) {
            const auto& bl = find_link(b->id, user->id);
            const auto ev = evaluate_link(bl, tx_watts(b), interf_user, bs_bandwidth(b->id));
            record_link(bl, ev);
            bs_user_rate[b->id] = ev.mean_rate_bps;
            bs_user_sinr[b->id] = ev.mean_sinr;
            std::vector<double> eve_rates;
            for (const auto* e : eves_) {
                const auto& el = find_link(b->id, e->id);
                const auto eev =
                    evaluate_link(el, tx_watts(b), interf_eve.at(e->id), bs_bandwidth(b->id));
                record_link(el, eev);
                eve_rates.push_back(eev.mean_rate_bps);
            }
            per_bs[b->id] = linkmetrics::secrecy_rate(ev.mean_rate_bps, eve_rates);
        }
        rec.per_bs_direct = per_bs;
        rec.rate_direct_bps = bs_user_rate.at(primary->id);
        rec.secrecy_direct = per_bs.at(primary->id);

        // Secondary users only feed the detectors.
        for (std::size_t ui = 1; ui < users_.size(); ++ui) {
            const auto* u = users_[ui];
            const auto& ul = find_link(primary->id, u->id);
            const auto ev = evaluate_link(ul, tx_watts(primary), interference_at(u->id),
                                          bs_bandwidth(primary->id));
            record_link(ul, ev);
        }

        // ---- relay path ------------------------------------------------------
        if (relay_on) {
            const auto& h1 = find_link(primary->id, relay_->id);
            const auto h1ev = evaluate_link(h1, tx_watts(primary), interference_at(relay_->id),
                                            bs_bandwidth(primary->id));
            record_link(h1, h1ev);
            const auto& h2 = find_link(relay_->id, user->id);
            const auto h2ev = evaluate_link(h2, tx_watts(relay_), interf_user, cfg_.bandwidth_hz);
            record_link(h2, h2ev);
            double relay_rate =
                linkmetrics::relay_path_rate(h1ev.mean_rate_bps, h2ev.mean_rate_bps);
            if (cfg_.policies.relay.half_duplex) relay_rate *= 0.5;
            rec.rate_relay_bps = relay_rate;

            // The eavesdropper overhears whichever hop reaches it better.
            std::vector<double> eve_rates;
            for (const auto* e : eves_) {
                const auto& rl = find_link(relay_->id, e->id);
                const auto rev = evaluate_link(rl, tx_watts(relay_), interf_eve.at(e->id),
                                               cfg_.bandwidth_hz);
                record_link(rl, rev);
                const double from_source = rec.links.at(link_name(primary->id, e->id)).mean_rate_bps;
                eve_rates.push_back(std::max(from_source, rev.mean_rate_bps));
            }
            const auto relayed = linkmetrics::secrecy_rate(relay_rate, eve_rates);
            rec.secrecy_relay =
                policies::evaluate_relay_option(rec.secrecy_direct, relayed,
                                                cfg_.policies.relay.mode)
                    .chosen;
        }

        // ---- serving-cell selection -----------------------------------------
        if (cfg_.policies.handover.enabled) {
            const auto decision = policies::select_serving_bs(
                per_bs, serving_, cfg_.policies.handover.hysteresis_bps);
            if (serving_.has_value() && decision.bs_id != serving_->bs_id) {
                handover_times_.push_back(t);
            }
            serving_ = decision;
        } else if (!serving_.has_value()) {
            serving_ = policies::ServingDecision{primary->id,
                                                 policies::ServingDecision::Reason::initial};
        }
        rec.serving_bs = serving_->bs_id;
        rec.serving_reason = serving_->reason == policies::ServingDecision::Reason::initial
                                 ? "initial"
                                 : "secrecy_handover";
        rec.secrecy_handover = per_bs.at(serving_->bs_id);
        rec.user_sinr_db = linkmetrics::linear_to_db(bs_user_sinr.at(serving_->bs_id));

        // ---- hot zone ---------------------------------------------------------
        if (hotzone_on) {
            const auto& bl = find_link(serving_->bs_id, user->id);
            const auto& hl = find_link(hotzone_->id, user->id);
            const NodeSpec* serving_node = nullptr;
            for (const auto* b : bs_) {
                if (b->id == serving_->bs_id) serving_node = b;
            }
            const double pb = tx_watts(serving_node);
            const double ph = tx_watts(hotzone_);
            const double bw = bs_bandwidth(serving_->bs_id);
            double rate_sum = 0.0;
            for (int k = 0; k < samples_; ++k) {
                const double jam[2] = {interf_user[k], interf_user[k]};
                rate_sum += policies::hotzone_rate(pb * bl.gains[k], ph * hl.gains[k], jam,
                                                   cfg_.noise, bw,
                                                   cfg_.policies.hotzone.egc_fallback);
            }
            rec.rate_hotzone_bps = rate_sum / samples_;
            if (!std::isfinite(rec.rate_hotzone_bps)) {
                throw numeric_error("non-finite hotzone rate at t=" + format_double(rec.t));
            }
        }

        // ---- detection ---------------------------------------------------------
        run_detection(rec);

        // ---- uplink interference mitigation -------------------------------------
        if (cfg_.policies.uplink.enabled) {
            run_uplink_mitigation(rec, t);
        }

        return rec;
    }

    void run_detection(StepRecord& rec) {
        if (!cfg_.policies.detection.enabled) return;
        // Window the recorded serving-downlink SINR of every user.
        metric_history_[users_.front()->id].push_back(rec.user_sinr_db);
        for (std::size_t ui = 1; ui < users_.size(); ++ui) {
            const auto* u = users_[ui];
            const auto it = rec.links.find(link_name(bs_.front()->id, u->id));
            if (it != rec.links.end()) metric_history_[u->id].push_back(it->second.mean_sinr_db);
        }
        const int window = cfg_.policies.detection.window_len;
        std::vector<detectloc::MetricWindow> windows;
        for (auto& [id, hist] : metric_history_) {
            while (hist.size() > static_cast<std::size_t>(window)) hist.pop_front();
            if (hist.size() == static_cast<std::size_t>(window)) {
                windows.push_back(
                    detectloc::MetricWindow{id, std::vector<double>(hist.begin(), hist.end())});
            }
        }
        if (windows.empty()) return;
        detectloc::DetectionReport report;
        if (cfg_.policies.detection.method == "centralized") {
            report = detectloc::detect_centralized(windows, cfg_.policies.detection.threshold_db);
        } else {
            if (windows.size() < 3) return; // needs peers to compare against
            report = detectloc::detect_distributed(windows, cfg_.policies.detection.k_mad);
        }
        rec.detect_flags = report.flagged;
    }

    void run_uplink_mitigation(StepRecord& rec, double t) {
        if (uplink_candidates_.empty()) return;
        const auto& up = cfg_.policies.uplink;

        // Deterministic allocations: candidate i owns a contiguous block.
        const int per_uav = std::max(1, static_cast<int>(up.rb_count * up.uav_rb_share));
        std::map<std::string, std::vector<int>> allocations;
        for (std::size_t i = 0; i < uplink_candidates_.size(); ++i) {
            std::vector<int> blocks;
            for (int rb = 0; rb < per_uav; ++rb) {
                blocks.push_back((static_cast<int>(i) * per_uav + rb) % up.rb_count);
            }
            allocations[uplink_candidates_[i]->id] = blocks;
        }

        // Serving BS per candidate: best mean gain. Everyone else is a victim.
        std::map<std::string, std::string> serving_of;
        for (const auto* c : uplink_candidates_) {
            std::string best_bs;
            double best_gain = -1.0;
            for (const auto* b : bs_) {
                const auto sampler = channel::LinkGainSampler::make(
                    rec.positions.at(c->id), rec.positions.at(b->id), classify(c, b),
                    cfg_.channel);
                if (sampler.mean_gain() > best_gain) {
                    best_gain = sampler.mean_gain();
                    best_bs = b->id;
                }
            }
            serving_of[c->id] = best_bs;
        }

        // Interference (dBm, fading-averaged) of each candidate at each BS,
        // with any active mitigation applied. Dedicated resources exclude the
        // aggressor's blocks at the victims entirely.
        auto interference_dbm = [&](const NodeSpec* c, const NodeSpec* b) {
            if (denied_.contains(c->id)) return -std::numeric_limits<double>::infinity();
            if (dedicated_active_ && c->id == dedicated_uav_ && victim_bs_.contains(b->id)) {
                return -std::numeric_limits<double>::infinity();
            }
            double p_dbm = c->tx_power_dbm.value();
            if (auto it = power_delta_db_.find(c->id); it != power_delta_db_.end()) {
                p_dbm -= it->second;
            }
            const auto sampler = channel::LinkGainSampler::make(
                rec.positions.at(c->id), rec.positions.at(b->id), classify(c, b), cfg_.channel);
            return p_dbm + linkmetrics::linear_to_db(sampler.mean_gain());
        };

        // Per-victim, per-block reports (noise-floored) and the worst
        // single-candidate interference each victim sees.
        detectloc::VictimBlockReports reports;
        std::map<std::string, double> worst_interference_dbm;
        bool over_threshold = false;
        for (const auto* b : bs_) {
            std::vector<double> per_rb(up.rb_count, 0.0);
            bool is_victim = false;
            for (const auto* c : uplink_candidates_) {
                if (serving_of.at(c->id) == b->id) continue; // not a victim of its own UE
                is_victim = true;
                const double i_dbm = interference_dbm(c, b);
                for (int rb : allocations.at(c->id)) {
                    per_rb[rb] += linkmetrics::dbm_to_watts(i_dbm);
                }
                auto [it, inserted] = worst_interference_dbm.try_emplace(b->id, i_dbm);
                if (!inserted) it->second = std::max(it->second, i_dbm);
                if (i_dbm > up.interference_threshold_dbm) over_threshold = true;
            }
            if (!is_victim) continue;
            std::vector<double> per_rb_dbm(up.rb_count);
            for (int rb = 0; rb < up.rb_count; ++rb) {
                per_rb_dbm[rb] =
                    linkmetrics::watts_to_dbm(per_rb[rb] + cfg_.noise.noise_power_w);
            }
            reports[b->id] = std::move(per_rb_dbm);
        }
        rec.uplink_victim_interference_dbm = worst_interference_dbm;

        if (mitigation_state_ != "-") {
            rec.mitigation_state = mitigation_state_;
            return; // one mitigation decision per run; it stays in force
        }
        if (!over_threshold || reports.empty()) return;

        const auto aggressor = detectloc::identify_uplink_aggressor(reports, allocations);
        if (aggressor.uav_id.empty()) return;

        const auto outcome = policies::mitigate_uplink(
            worst_interference_dbm, aggressor.uav_id, up.kind, up.interference_threshold_dbm,
            up.uav_rb_share);
        std::ostringstream desc;
        switch (outcome.kind) {
        case policies::UplinkMitigationKind::deny:
            denied_.insert(outcome.aggressor_id);
            desc << "deny(" << outcome.aggressor_id << ")";
            break;
        case policies::UplinkMitigationKind::power_control:
            power_delta_db_[outcome.aggressor_id] = outcome.power_delta_db;
            desc << "power_control(" << outcome.aggressor_id << ",-"
                 << format_double(outcome.power_delta_db) << "dB)";
            break;
        case policies::UplinkMitigationKind::dedicated_resources:
            dedicated_active_ = true;
            dedicated_bw_factor_ = outcome.victim_bandwidth_factor;
            dedicated_uav_ = outcome.aggressor_id;
            for (const auto& [bs_id, r] : reports) victim_bs_.insert(bs_id);
            desc << "dedicated_resources(" << outcome.aggressor_id << ")";
            break;
        }
        mitigation_state_ = desc.str();
        rec.mitigation_state = mitigation_state_;
        mitigation_event_ = "t=" + format_double(t) + " " + mitigation_state_;
    }

    RunSummary summarize(const RunResult& result) const {
        RunSummary s;
        s.name = cfg_.name;
        s.seed = cfg_.master_seed;
        s.config_digest = config_digest(cfg_);
        s.steps = result.records.size();
        s.handover_count = static_cast<int>(handover_times_.size());
        s.handover_times = handover_times_;
        if (!mitigation_event_.empty()) s.mitigation_events.push_back(mitigation_event_);

        auto curve = [&](const std::string& name, auto getter) {
            CurveStats cs;
            cs.min = std::numeric_limits<double>::infinity();
            cs.max = -std::numeric_limits<double>::infinity();
            double sum = 0.0;
            for (const auto& r : result.records) {
                const double v = getter(r);
                sum += v;
                cs.min = std::min(cs.min, v);
                cs.max = std::max(cs.max, v);
            }
            cs.mean = sum / static_cast<double>(result.records.size());
            s.curves[name] = cs;
        };
        curve("rate_direct_bps", [](const StepRecord& r) { return r.rate_direct_bps; });
        curve("secrecy_direct_bps",
              [](const StepRecord& r) { return r.secrecy_direct.secrecy_rate_bps; });
        curve("secrecy_handover_bps",
              [](const StepRecord& r) { return r.secrecy_handover.secrecy_rate_bps; });
        if (cfg_.policies.relay.enabled) {
            curve("rate_relay_bps", [](const StepRecord& r) { return r.rate_relay_bps; });
            curve("secrecy_relay_bps",
                  [](const StepRecord& r) { return r.secrecy_relay.secrecy_rate_bps; });
        }
        if (cfg_.policies.hotzone.enabled) {
            curve("rate_hotzone_bps", [](const StepRecord& r) { return r.rate_hotzone_bps; });
        }

        for (std::size_t i = 0; i < result.records.size(); ++i) {
            for (const auto& id : result.records[i].detect_flags) {
                s.first_detection_step.try_emplace(id, i);
            }
        }
        return s;
    }

    const ScenarioConfig& cfg_;
    RunOptions opts_;
    int samples_ = 1;

    std::vector<const NodeSpec*> bs_;
    std::vector<const NodeSpec*> users_;
    std::vector<const NodeSpec*> eves_;
    std::vector<const NodeSpec*> jammers_;
    std::vector<const NodeSpec*> safezone_uavs_;
    std::vector<const NodeSpec*> uplink_candidates_;
    const NodeSpec* relay_ = nullptr;
    const NodeSpec* hotzone_ = nullptr;

    std::optional<policies::ServingDecision> serving_;
    std::vector<double> handover_times_;
    std::map<std::string, std::deque<double>> metric_history_;

    // Uplink mitigation state, sticky once applied.
    std::set<std::string> denied_;
    std::map<std::string, double> power_delta_db_;
    std::set<std::string> victim_bs_;
    bool dedicated_active_ = false;
    double dedicated_bw_factor_ = 1.0;
    std::string dedicated_uav_;
    std::string mitigation_state_ = "-";
    std::string mitigation_event_;
};

} // namespace

RunResult run(const ScenarioConfig& cfg, const RunOptions& opts) {
    ScenarioConfig effective = cfg;
    if (opts.seed_override.has_value()) effective.master_seed = *opts.seed_override;
    Simulation sim(effective, opts);
    RunResult result = sim.execute();
    result.config = effective;
    return result;
}

std::string format_records_csv(const RunResult& result) {
    const auto& all = known_output_columns();
    std::vector<std::string> cols;
    for (const auto& c : all) {
        if (std::find(result.config.outputs.begin(), result.config.outputs.end(), c) !=
            result.config.outputs.end()) {
            cols.push_back(c);
        }
    }
    std::string out;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i > 0) out += ",";
        out += cols[i];
    }
    out += "\n";
    const std::string user_id = [&]() {
        for (const auto& n : result.config.nodes) {
            if (n.role == scene::Role::user) return n.id;
        }
        return std::string{};
    }();
    for (const auto& r : result.records) {
        for (std::size_t i = 0; i < cols.size(); ++i) {
            if (i > 0) out += ",";
            const auto& c = cols[i];
            if (c == "t_s") out += format_double(r.t);
            else if (c == "user_x_m") out += format_double(r.positions.at(user_id).x);
            else if (c == "user_y_m") out += format_double(r.positions.at(user_id).y);
            else if (c == "user_z_m") out += format_double(r.positions.at(user_id).z);
            else if (c == "serving_bs") out += r.serving_bs;
            else if (c == "rate_direct_bps") out += format_double(r.rate_direct_bps);
            else if (c == "rate_relay_bps") out += format_double(r.rate_relay_bps);
            else if (c == "rate_hotzone_bps") out += format_double(r.rate_hotzone_bps);
            else if (c == "secrecy_direct_bps") out += format_double(r.secrecy_direct.secrecy_rate_bps);
            else if (c == "secrecy_relay_bps") out += format_double(r.secrecy_relay.secrecy_rate_bps);
            else if (c == "secrecy_handover_bps") out += format_double(r.secrecy_handover.secrecy_rate_bps);
            else if (c == "detect_flags") out += join_or_dash(r.detect_flags);
            else if (c == "mitigation_state") out += r.mitigation_state;
        }
        out += "\n";
    }
    return out;
}

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot open '" + path + "' for writing");
    os << content;
    if (!os) throw io_error("failed writing '" + path + "'");
}

json summary_to_json(const RunSummary& s) {
    json curves = json::object();
    for (const auto& [name, cs] : s.curves) {
        curves[name] = {{"mean", cs.mean}, {"min", cs.min}, {"max", cs.max}};
    }
    json detections = json::object();
    for (const auto& [id, step] : s.first_detection_step) detections[id] = step;
    return json{{"name", s.name},
                {"seed", s.seed},
                {"config_digest", s.config_digest},
                {"steps", s.steps},
                {"curves", curves},
                {"handover_count", s.handover_count},
                {"handover_times", s.handover_times},
                {"first_detection_step", detections},
                {"mitigation_events", s.mitigation_events}};
}

} // namespace

void emit_records_csv(const RunResult& result, const std::string& path) {
    write_file(path, format_records_csv(result));
}

void emit_records_json(const RunResult& result, const std::string& path) {
    const auto& all = known_output_columns();
    std::vector<std::string> cols;
    for (const auto& c : all) {
        if (std::find(result.config.outputs.begin(), result.config.outputs.end(), c) !=
            result.config.outputs.end()) {
            cols.push_back(c);
        }
    }
    const std::string user_id = [&]() {
        for (const auto& n : result.config.nodes) {
            if (n.role == scene::Role::user) return n.id;
        }
        return std::string{};
    }();
    json rows = json::array();
    for (const auto& r : result.records) {
        json row = json::object();
        for (const auto& c : cols) {
            if (c == "t_s") row[c] = r.t;
            else if (c == "user_x_m") row[c] = r.positions.at(user_id).x;
            else if (c == "user_y_m") row[c] = r.positions.at(user_id).y;
            else if (c == "user_z_m") row[c] = r.positions.at(user_id).z;
            else if (c == "serving_bs") row[c] = r.serving_bs;
            else if (c == "rate_direct_bps") row[c] = r.rate_direct_bps;
            else if (c == "rate_relay_bps") row[c] = r.rate_relay_bps;
            else if (c == "rate_hotzone_bps") row[c] = r.rate_hotzone_bps;
            else if (c == "secrecy_direct_bps") row[c] = r.secrecy_direct.secrecy_rate_bps;
            else if (c == "secrecy_relay_bps") row[c] = r.secrecy_relay.secrecy_rate_bps;
            else if (c == "secrecy_handover_bps") row[c] = r.secrecy_handover.secrecy_rate_bps;
            else if (c == "detect_flags") row[c] = r.detect_flags;
            else if (c == "mitigation_state") row[c] = r.mitigation_state;
        }
        rows.push_back(std::move(row));
    }
    write_file(path, json{{"records", rows}}.dump(2) + "\n");
}

void emit_summary_json(const RunResult& result, const std::string& path) {
    write_file(path, summary_to_json(result.summary).dump(2) + "\n");
}

void emit_effective_config(const RunResult& result, const std::string& path) {
    write_file(path, scenario_to_json(result.config).dump(2) + "\n");
}

std::vector<SweepRow> sweep(const nlohmann::json& base_scenario, const std::string& param_path,
                            std::span<const double> values, const RunOptions& opts) {
    // Resolve the dotted path down to a numeric leaf.
    auto set_leaf = [&](json& root, double value) {
        json* cur = &root;
        std::istringstream tokens(param_path);
        std::string tok;
        while (std::getline(tokens, tok, '.')) {
            if (cur->is_array()) {
                std::size_t idx = 0;
                const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), idx);
                if (res.ec != std::errc{} || idx >= cur->size()) {
                    throw config_error("sweep: bad array index '" + tok + "' in path '" +
                                       param_path + "'");
                }
                cur = &(*cur)[idx];
            } else if (cur->is_object()) {
                if (!cur->contains(tok)) {
                    throw config_error("sweep: no field '" + tok + "' in path '" + param_path + "'");
                }
                cur = &(*cur)[tok];
            } else {
                throw config_error("sweep: path '" + param_path + "' descends through a scalar");
            }
        }
        if (!cur->is_number()) {
            throw config_error("sweep: target field '" + param_path + "' is not numeric");
        }
        *cur = value;
    };

    std::vector<SweepRow> rows;
    const std::uint64_t base_seed = base_scenario.value("master_seed", std::uint64_t{1});
    for (std::size_t i = 0; i < values.size(); ++i) {
        json variant = base_scenario;
        set_leaf(variant, values[i]);
        variant["master_seed"] = base_seed + i;
        ScenarioConfig cfg = parse_scenario(variant);
        RunOptions row_opts = opts;
        row_opts.seed_override.reset();
        const RunResult result = run(cfg, row_opts);
        rows.push_back(SweepRow{values[i], cfg.master_seed, result.summary});
    }
    return rows;
}

std::string format_sweep_csv(const std::string& param_path, std::span<const SweepRow> rows) {
    // Union of curve names across rows, in map order.
    std::vector<std::string> curve_names;
    for (const auto& r : rows) {
        for (const auto& [name, cs] : r.summary.curves) {
            if (std::find(curve_names.begin(), curve_names.end(), name) == curve_names.end()) {
                curve_names.push_back(name);
            }
        }
    }
    std::sort(curve_names.begin(), curve_names.end());
    std::string out = "param,value,seed,steps";
    for (const auto& n : curve_names) out += ",mean_" + n;
    out += "\n";
    for (const auto& r : rows) {
        out += param_path + "," + format_double(r.value) + "," + std::to_string(r.seed) + "," +
               std::to_string(r.summary.steps);
        for (const auto& n : curve_names) {
            const auto it = r.summary.curves.find(n);
            out += ",";
            out += it == r.summary.curves.end() ? "-" : format_double(it->second.mean);
        }
        out += "\n";
    }
    return out;
}

} // namespace uavsec::engine
