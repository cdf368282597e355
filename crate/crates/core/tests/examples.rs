macro_rules! example_test {
    ($module:ident, $file:literal) => {
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $module() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example_test!(load_and_stats, "load_and_stats.rs");
example_test!(exact_counting, "exact_counting.rs");
example_test!(sampling_estimators, "sampling_estimators.rs");
example_test!(error_bounds, "error_bounds.rs");
example_test!(accuracy_experiment, "accuracy_experiment.rs");
example_test!(tau_sweep, "tau_sweep.rs");
