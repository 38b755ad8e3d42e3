#[path = "../examples/integral_image.rs"]
mod integral_image;
#[path = "../examples/template_selection.rs"]
mod template_selection;
#[path = "../examples/naive_bayes_update.rs"]
mod naive_bayes_update;
#[path = "../examples/evaluate_trajectory.rs"]
mod evaluate_trajectory;
#[path = "../examples/snapshot_resume.rs"]
mod snapshot_resume;
#[path = "../examples/track_synthetic.rs"]
mod track_synthetic;

#[test]
fn integral_image_runs() {
    integral_image::run_example().unwrap();
}

#[test]
fn template_selection_runs() {
    template_selection::run_example().unwrap();
}

#[test]
fn naive_bayes_update_runs() {
    naive_bayes_update::run_example().unwrap();
}

#[test]
fn evaluate_trajectory_runs() {
    evaluate_trajectory::run_example().unwrap();
}

#[test]
fn snapshot_resume_runs() {
    snapshot_resume::run_example().unwrap();
}

#[test]
fn track_synthetic_runs() {
    track_synthetic::run_example().unwrap();
}
