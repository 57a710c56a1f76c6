// Generated from the contents of scenarios/.
pub(super) const BUNDLED: &[(&str, &str)] = &[
    ("fig10-HV-DA-p1-LSVS", include_str!("../../scenarios/fig10-HV-DA-p1-LSVS.scn")),
    ("fig10-HV-DA-p2-LSVS", include_str!("../../scenarios/fig10-HV-DA-p2-LSVS.scn")),
    ("fig10-HV-DP-LSVS", include_str!("../../scenarios/fig10-HV-DP-LSVS.scn")),
    ("fig10-LV-DA-p1-LSVS", include_str!("../../scenarios/fig10-LV-DA-p1-LSVS.scn")),
    ("fig10-LV-DA-p2-LSVS", include_str!("../../scenarios/fig10-LV-DA-p2-LSVS.scn")),
    ("fig10-LV-DP-LSVS", include_str!("../../scenarios/fig10-LV-DP-LSVS.scn")),
    ("fig11-HV-DA-p1-ctrl", include_str!("../../scenarios/fig11-HV-DA-p1-ctrl.scn")),
    ("fig11-HV-DA-p2-ctrl", include_str!("../../scenarios/fig11-HV-DA-p2-ctrl.scn")),
    ("fig11-HV-DP-ctrl", include_str!("../../scenarios/fig11-HV-DP-ctrl.scn")),
    ("fig11-LV-DA-p1-ctrl", include_str!("../../scenarios/fig11-LV-DA-p1-ctrl.scn")),
    ("fig11-LV-DA-p2-ctrl", include_str!("../../scenarios/fig11-LV-DA-p2-ctrl.scn")),
    ("fig11-LV-DP-ctrl", include_str!("../../scenarios/fig11-LV-DP-ctrl.scn")),
    ("fig12-HV-DA-p1-ctrl", include_str!("../../scenarios/fig12-HV-DA-p1-ctrl.scn")),
    ("fig12-HV-DA-p2-ctrl", include_str!("../../scenarios/fig12-HV-DA-p2-ctrl.scn")),
    ("fig12-HV-DP-ctrl", include_str!("../../scenarios/fig12-HV-DP-ctrl.scn")),
    ("fig12-LV-DA-p1-ctrl", include_str!("../../scenarios/fig12-LV-DA-p1-ctrl.scn")),
    ("fig12-LV-DA-p2-ctrl", include_str!("../../scenarios/fig12-LV-DA-p2-ctrl.scn")),
    ("fig12-LV-DP-ctrl", include_str!("../../scenarios/fig12-LV-DP-ctrl.scn")),
    ("fig2-event-HV-DA", include_str!("../../scenarios/fig2-event-HV-DA.scn")),
    ("fig2-event-HV-DP", include_str!("../../scenarios/fig2-event-HV-DP.scn")),
    ("fig2-event-LV-DA", include_str!("../../scenarios/fig2-event-LV-DA.scn")),
    ("fig2-event-LV-DP", include_str!("../../scenarios/fig2-event-LV-DP.scn")),
    ("fig2-model-HV-DA", include_str!("../../scenarios/fig2-model-HV-DA.scn")),
    ("fig2-model-HV-DP", include_str!("../../scenarios/fig2-model-HV-DP.scn")),
    ("fig2-model-LV-DA", include_str!("../../scenarios/fig2-model-LV-DA.scn")),
    ("fig2-model-LV-DP", include_str!("../../scenarios/fig2-model-LV-DP.scn")),
    ("fig3-HV-DA", include_str!("../../scenarios/fig3-HV-DA.scn")),
    ("fig3-HV-DP", include_str!("../../scenarios/fig3-HV-DP.scn")),
    ("fig3-HV-SA", include_str!("../../scenarios/fig3-HV-SA.scn")),
    ("fig3-HV-SP", include_str!("../../scenarios/fig3-HV-SP.scn")),
    ("fig3-LV-DA", include_str!("../../scenarios/fig3-LV-DA.scn")),
    ("fig3-LV-DP", include_str!("../../scenarios/fig3-LV-DP.scn")),
    ("fig3-LV-SA", include_str!("../../scenarios/fig3-LV-SA.scn")),
    ("fig3-LV-SP", include_str!("../../scenarios/fig3-LV-SP.scn")),
    ("fig4-HV-SA", include_str!("../../scenarios/fig4-HV-SA.scn")),
    ("fig4-LV-SA", include_str!("../../scenarios/fig4-LV-SA.scn")),
    ("fig5-HV-DP", include_str!("../../scenarios/fig5-HV-DP.scn")),
    ("fig5-LV-DP", include_str!("../../scenarios/fig5-LV-DP.scn")),
    ("fig6-HV-DA-s1", include_str!("../../scenarios/fig6-HV-DA-s1.scn")),
    ("fig6-HV-DA-s32", include_str!("../../scenarios/fig6-HV-DA-s32.scn")),
    ("fig6-HV-DA-s8", include_str!("../../scenarios/fig6-HV-DA-s8.scn")),
    ("fig6-LV-DA-s1", include_str!("../../scenarios/fig6-LV-DA-s1.scn")),
    ("fig6-LV-DA-s32", include_str!("../../scenarios/fig6-LV-DA-s32.scn")),
    ("fig6-LV-DA-s8", include_str!("../../scenarios/fig6-LV-DA-s8.scn")),
    ("fig7-HV-DA-p1", include_str!("../../scenarios/fig7-HV-DA-p1.scn")),
    ("fig7-HV-DA-p2", include_str!("../../scenarios/fig7-HV-DA-p2.scn")),
    ("fig7-LV-DA-p1", include_str!("../../scenarios/fig7-LV-DA-p1.scn")),
    ("fig7-LV-DA-p2", include_str!("../../scenarios/fig7-LV-DA-p2.scn")),
    ("fig8-HV-DA-p1-sync", include_str!("../../scenarios/fig8-HV-DA-p1-sync.scn")),
    ("fig8-HV-DA-p2-sync", include_str!("../../scenarios/fig8-HV-DA-p2-sync.scn")),
    ("fig8-HV-DA-s1-poll", include_str!("../../scenarios/fig8-HV-DA-s1-poll.scn")),
    ("fig8-HV-DA-s32-poll", include_str!("../../scenarios/fig8-HV-DA-s32-poll.scn")),
    ("fig8-HV-DA-s8-poll", include_str!("../../scenarios/fig8-HV-DA-s8-poll.scn")),
    ("fig8-HV-DA-ts", include_str!("../../scenarios/fig8-HV-DA-ts.scn")),
    ("fig8-HV-DP-sync", include_str!("../../scenarios/fig8-HV-DP-sync.scn")),
    ("fig8-HV-DP-ts", include_str!("../../scenarios/fig8-HV-DP-ts.scn")),
    ("fig8-HV-SA-poll", include_str!("../../scenarios/fig8-HV-SA-poll.scn")),
    ("fig8-HV-SA-ts", include_str!("../../scenarios/fig8-HV-SA-ts.scn")),
    ("fig8-HV-SP-ts", include_str!("../../scenarios/fig8-HV-SP-ts.scn")),
    ("fig8-LV-DA-p1-sync", include_str!("../../scenarios/fig8-LV-DA-p1-sync.scn")),
    ("fig8-LV-DA-p2-sync", include_str!("../../scenarios/fig8-LV-DA-p2-sync.scn")),
    ("fig8-LV-DA-s1-poll", include_str!("../../scenarios/fig8-LV-DA-s1-poll.scn")),
    ("fig8-LV-DA-s32-poll", include_str!("../../scenarios/fig8-LV-DA-s32-poll.scn")),
    ("fig8-LV-DA-s8-poll", include_str!("../../scenarios/fig8-LV-DA-s8-poll.scn")),
    ("fig8-LV-DA-ts", include_str!("../../scenarios/fig8-LV-DA-ts.scn")),
    ("fig8-LV-DP-sync", include_str!("../../scenarios/fig8-LV-DP-sync.scn")),
    ("fig8-LV-DP-ts", include_str!("../../scenarios/fig8-LV-DP-ts.scn")),
    ("fig8-LV-SA-poll", include_str!("../../scenarios/fig8-LV-SA-poll.scn")),
    ("fig8-LV-SA-ts", include_str!("../../scenarios/fig8-LV-SA-ts.scn")),
    ("fig8-LV-SP-ts", include_str!("../../scenarios/fig8-LV-SP-ts.scn")),
    ("fig9-HV-DA-p1-LSVS", include_str!("../../scenarios/fig9-HV-DA-p1-LSVS.scn")),
    ("fig9-HV-DA-p2-LSVS", include_str!("../../scenarios/fig9-HV-DA-p2-LSVS.scn")),
    ("fig9-HV-DP-LSVS", include_str!("../../scenarios/fig9-HV-DP-LSVS.scn")),
    ("fig9-LV-DA-p1-LSVS", include_str!("../../scenarios/fig9-LV-DA-p1-LSVS.scn")),
    ("fig9-LV-DA-p2-LSVS", include_str!("../../scenarios/fig9-LV-DA-p2-LSVS.scn")),
    ("fig9-LV-DP-LSVS", include_str!("../../scenarios/fig9-LV-DP-LSVS.scn")),
];
