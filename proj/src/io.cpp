#include "popproto/io.hpp"

#include <fstream>
#include <sstream>

namespace popproto {

using nlohmann::json;

json to_json(const Protocol& p) {
  json doc = json::object();
  doc["states"] = p.names();
  json ts = json::array();
  for (const auto& t : p.transitions()) {
    json pre = json::array(), post = json::array();
    for (StateId s : t.pre()) pre.push_back(p.name(s));
    for (StateId s : t.post()) post.push_back(p.name(s));
    ts.push_back(json{{"pre", pre}, {"post", post}});
  }
  doc["transitions"] = ts;
  json init = json::array();
  for (StateId s : p.initial()) init.push_back(p.name(s));
  doc["initial"] = init;
  json leaders = json::object();
  for (const auto& [s, n] : p.leaders().entries()) leaders[p.name(s)] = n;
  doc["leaders"] = leaders;
  json out = json::object();
  for (StateId s = 0; s < p.num_states(); ++s) out[p.name(s)] = p.output(s);
  doc["output"] = out;
  doc["meta"] = p.meta();
  return doc;
}

Protocol protocol_from_json(const json& doc) {
  try {
    if (!doc.is_object()) throw MalformedProtocol("protocol document must be an object");
    ProtocolBuilder b;
    const json& out = doc.at("output");
    for (const auto& s : doc.at("states")) {
      const std::string name = s.get<std::string>();
      if (!out.contains(name)) throw MalformedProtocol("state '" + name + "' has no output");
      b.state(name, out.at(name).get<int>());
    }
    for (const auto& [name, v] : out.items()) {
      if (!b.has_state(name)) throw MalformedProtocol("output for undeclared state '" + name + "'");
    }
    for (const auto& t : doc.at("transitions")) {
      b.transition(t.at("pre").get<std::vector<std::string>>(),
                   t.at("post").get<std::vector<std::string>>());
    }
    for (const auto& s : doc.at("initial")) b.initial(s.get<std::string>());
    if (doc.contains("leaders")) {
      for (const auto& [name, n] : doc.at("leaders").items()) {
        const auto count = n.get<std::int64_t>();
        if (count < 0) throw MalformedProtocol("negative leader count");
        if (count > 0) b.leader(name, static_cast<Count>(count));
      }
    }
    if (doc.contains("meta")) b.meta() = doc.at("meta");
    return b.build();
  } catch (const json::exception& e) {
    throw MalformedProtocol(std::string("protocol document: ") + e.what());
  }
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw MalformedProtocol(path.string() + ": " + e.what());
  }
}

Protocol read_protocol(const std::filesystem::path& path) {
  return protocol_from_json(read_json(path));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

void write_protocol(const Protocol& p, const std::filesystem::path& path) {
  write_text(path, dump(to_json(p)));
}

}  // namespace popproto
