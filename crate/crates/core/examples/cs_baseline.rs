//! Proposed space-time scheduling against the collision-set baseline that
//! treats the whole conflict area as one resource.

use crossroads::sim::{plan, FlowMix, Scenario, Strategy};

fn main() -> crossroads::Result<()> {
    for (name, mix) in [("flow1", FlowMix::flow1()), ("flow2", FlowMix::flow2())] {
        let mut s = Scenario::default();
        s.traffic.mix = mix;
        s.traffic.vehicles = 30;
        let requests = s.requests()?;
        let (proposed, _) = plan(&s, Strategy::Proposed, &requests)?;
        let (cs, _) = plan(&s, Strategy::Cs, &requests)?;
        let (tp, tc) = (proposed.total_passing_time(), cs.total_passing_time());
        println!(
            "{name}: proposed {tp:7.2} s, collision-set {tc:7.2} s, improvement {:.1}%, makespan {:.1} vs {:.1} s",
            100.0 * (tc - tp) / tc,
            proposed.makespan(),
            cs.makespan()
        );
    }
    Ok(())
}
