from preprocessing.preprocessing import Preprocessing
from services.command_line_service import get_cl_args_preproc


def main():
    # Get command line arguments
    args = get_cl_args_preproc()

    if args.function == "create_sample":
        if not args.count or not args.output_path:
            raise ValueError("Both count and output_path must be specified for create_sample function.")
        Preprocessing.create_sample(count=args.count, output_path=args.output_path, size=args.size,
                                    exposure=args.exposure, noise_sigma=args.noise_sigma, seed=args.seed)
    elif args.function == "sample_stats":
        if not args.input_path:
            raise ValueError("input_path must be specified for sample_stats function.")
        Preprocessing.sample_stats(input_path=args.input_path)


if __name__ == "__main__":
    main()
