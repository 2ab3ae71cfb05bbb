import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from wargamer.model import (
    ComponentTemplate,
    LevelVar,
    compose,
    instantiate_template,
)


@pytest.fixture
def single_var_template():
    """k=1 block: one state var, one input port, one output port."""

    def make(a=1.0, b=1.0, c=0.0, x0=50.0, noise=0.0, polarity="favorable-high",
             tpl_id="unit"):
        return ComponentTemplate(
            id=tpl_id,
            kind="economic",
            state_vars=(LevelVar("level", x0, polarity),),
            input_ports=("inflow",),
            output_ports=("signal",),
            dynamics_a=((a,),),
            dynamics_b=((b,),),
            bias=(c,),
            output_map=((1.0,),),
            noise_std=(noise,),
        )

    return make


@pytest.fixture
def single_instance_graph(single_var_template):
    def make(a=1.0, b=1.0, c=0.0, x0=50.0, noise=0.0, polarity="favorable-high"):
        tpl = single_var_template(a=a, b=b, c=c, x0=x0, noise=noise, polarity=polarity)
        inst = instantiate_template(tpl, region="only", instance_id="only")
        return compose({tpl.id: tpl}, [inst])

    return make
