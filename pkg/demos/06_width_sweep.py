"""Decoder capacity probe: train loss and test loss versus hidden width.

Every width trains on the same fixed finite set of (message, noise) draws
with the same batch schedule, so the only thing that changes is model
capacity.  Train loss falls as width grows; the gap to the loss on fresh
noise shows how much of the fit is memorized noise rather than code
structure.  The probe emits the numbers and makes no claim about the shape.
"""

from aecomm import ExperimentConfig, harness

WIDTHS = (2, 4, 8, 16, 32, 64)


def main():
    config = ExperimentConfig(steps=2000, seeds=(0,))
    print(f"training one decoder per width on a fixed 1024-sample set "
          f"({config.steps} steps each)...")
    rows = harness.width_sweep(config, WIDTHS, train_ebn0_db=7.0,
                               train_set_size=1024, test_set_size=50_000)

    print()
    print("width   params   train loss   test loss    gap")
    for row in rows:
        gap = row.test_loss - row.train_loss
        print(f"{row.decoder_hidden:5d}   {row.parameter_count:6d}   "
              f"{row.train_loss:10.4f}   {row.test_loss:9.4f}   {gap:+.4f}")

    print()
    print("csv form:")
    print(harness.width_sweep_to_csv(rows), end="")


if __name__ == "__main__":
    main()
