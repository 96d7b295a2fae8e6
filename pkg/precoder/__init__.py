from .channel_model import ChannelSpec, JointPmf, ValidatedChannel, validate_channel
