#include "ctxlab/tool.hpp"

#include "ctxlab/errors.hpp"

namespace ctxlab {

using nlohmann::json;

void check_tool_args(const ToolDescriptor& descriptor, const json& args) {
    if (!args.is_object())
        throw ParseError("tool '" + descriptor.name +
                             "' expects a JSON object of arguments",
                         descriptor.name);
    for (const auto& param : descriptor.params) {
        if (!args.contains(param.name))
            throw ParseError("missing variable: " + param.name, param.name);
        const json& v = args.at(param.name);
        bool ok = false;
        switch (param.type) {
            case ValueType::Integer: ok = v.is_number_integer(); break;
            case ValueType::Real: ok = v.is_number(); break;
            case ValueType::Text: ok = v.is_string(); break;
        }
        if (!ok)
            throw ParseError("variable '" + param.name +
                                 "' has the wrong type: " + v.dump(),
                             param.name);
    }
}

std::string tool_result_text(const json& result) {
    if (result.is_string()) return result.get<std::string>();
    return result.dump();
}

ContextItem invoke_tool(const ToolDescriptor& descriptor,
                        const ContextItem& call_item,
                        const ContextItem& context) {
    json args;
    try {
        args = json::parse(call_item.text());
    } catch (const json::parse_error& e) {
        throw ParseError("tool '" + descriptor.name +
                             "' call is not valid JSON: " + e.what(),
                         descriptor.name);
    }
    check_tool_args(descriptor, args);

    std::string result_text;
    try {
        result_text = tool_result_text(descriptor.hook(args));
    } catch (const std::exception& e) {
        result_text = std::string("error: ") + e.what();
    }
    return context + ContextItem(std::move(result_text), Role::Tool);
}

}  // namespace ctxlab
