import inspect
from collections.abc import Generator
from pathlib import Path
from typing import Any

import yaml
from pydantic import ValidationError

from photon_scintillation.api.force_models import FrozenScreens, WhiteNoiseDiffusion
from photon_scintillation.api.meta import FockStatistics, ForceModel, PoissonStatistics


def _iterate_mapping_node(
        loader: yaml.SafeLoader,
        node: yaml.nodes.MappingNode
) -> Generator[tuple[str, any], None, None]:
    for mapping_node in node.value:
        key_node, value_node = mapping_node
        yield key_node.value, loader.construct_object(value_node, True)


def _construct_fock(loader: yaml.SafeLoader, node: yaml.nodes.ScalarNode) -> FockStatistics:
    try:
        return FockStatistics(photons=loader.construct_yaml_int(node))
    except (ValueError, ValidationError) as e:
        raise yaml.constructor.ConstructorError(None, None,
                                                "invalid photon number %s for %r: %s" % (node.value, node.tag, e),
                                                node.start_mark)


def _construct_poisson(loader: yaml.SafeLoader, node: yaml.nodes.ScalarNode) -> PoissonStatistics:
    try:
        return PoissonStatistics(mean_photons=float(loader.construct_scalar(node)))
    except (ValueError, ValidationError) as e:
        raise yaml.constructor.ConstructorError(None, None,
                                                "invalid mean photon number %s for %r: %s" % (node.value, node.tag, e),
                                                node.start_mark)


def _force_model_constructor(implementation: type[ForceModel]):
    supported = [name for name in inspect.signature(implementation.__init__).parameters if name != "self"]

    def construct(loader: yaml.SafeLoader, node: yaml.nodes.Node) -> ForceModel:
        kwargs = {}
        if isinstance(node, yaml.nodes.MappingNode):
            for key, val in _iterate_mapping_node(loader, node):
                if key not in supported:
                    raise yaml.constructor.ConstructorError(None, None,
                                                            "Unsupported argument %s with value '%s'" % (key, val),
                                                            node.start_mark)
                kwargs[key] = val
        elif not (isinstance(node, yaml.nodes.ScalarNode) and node.value == ""):
            raise yaml.constructor.ConstructorError(None, None,
                                                    "Tag %r expects a mapping of arguments" % node.tag,
                                                    node.start_mark)

        try:
            return implementation(**kwargs)
        except (TypeError, ValueError) as e:
            raise yaml.constructor.ConstructorError(None, None,
                                                    "Force model for tag %r could not be created: %s" % (node.tag, e),
                                                    node.start_mark)

    return construct


class YamlSafeLoaderWithFileContext(yaml.SafeLoader):
    file_path: Path


def _construct_file_content(loader: YamlSafeLoaderWithFileContext, node: yaml.nodes.ScalarNode) -> Any:
    """Plain YAML value stored in a file next to the config, e.g. a list of distances"""
    file_path = Path(loader.file_path.parent, node.value)
    if not file_path.exists() or file_path.is_dir():
        raise yaml.constructor.ConstructorError(None, None,
                                                "%s does not resolve to a file" % str(file_path),
                                                node.start_mark)
    try:
        return yaml.safe_load(file_path.read_text())
    except yaml.YAMLError as e:
        raise yaml.constructor.ConstructorError(None, None,
                                                "%s does not contain plain YAML: %s" % (str(file_path), e),
                                                node.start_mark)


def _construct_env_var_content(_: YamlSafeLoaderWithFileContext, node: yaml.nodes.ScalarNode) -> str:
    from os import environ
    env_var = node.value
    val = environ.get(env_var, None)
    if val is None:
        raise yaml.constructor.ConstructorError(None, None,
                                                "Environment variable %s not set" % env_var,
                                                node.start_mark)
    return val


def _yaml_loader(file_path: Path) -> type[YamlSafeLoaderWithFileContext]:
    loader = type("ExperimentLoader", (YamlSafeLoaderWithFileContext,), {"file_path": file_path})
    loader.add_constructor("!Fock", _construct_fock)
    loader.add_constructor("!Poisson", _construct_poisson)
    loader.add_constructor("!WhiteNoiseDiffusion", _force_model_constructor(WhiteNoiseDiffusion))
    loader.add_constructor("!FrozenScreens", _force_model_constructor(FrozenScreens))
    loader.add_constructor("!FileContent", _construct_file_content)
    loader.add_constructor("!Env", _construct_env_var_content)
    return loader


def load_file(file_path: Path) -> dict:
    with file_path.open("r") as file:
        data = load_stream(file, file_path)
    return data


def load_stream(stream, file_path: Path) -> dict:
    return yaml.load(stream, Loader=_yaml_loader(file_path))
